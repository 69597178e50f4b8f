"""Coefficients of x -> Tr (A + x B)^p and their Hermitian gradients.

The coefficient of x^r is the sum of the traces of all ordered products of
p - r copies of A and r copies of B. It is computed by a recurrence over
degree-truncated polynomial matrices, T_k[j] = A T_{k-1}[j] + B T_{k-1}[j-1]
with T_0 = I, which costs O(p * r_max) small matrix products and exposes every
intermediate needed by the reverse-mode gradient.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import DomainError, ImaginaryResidueError
from .matcore import HermitianMatrix, hermitian, same_dim

# imaginary residue above this (relative to the coefficient scale) is a bug
IM_RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class TracePolynomial:
    """Real coefficients c[0..r_max] of x -> Tr (A + x B)^p."""

    p: int
    coeffs: np.ndarray
    r_max: int

    def __post_init__(self):
        assert len(self.coeffs) == self.r_max + 1


def coeff_scale(a: HermitianMatrix, b: HermitianMatrix, p: int, r: int) -> float:
    """Magnitude estimate n * |A|^(p-r) * |B|^r for the coefficient of x^r."""
    return a.n * a.opnorm ** (p - r) * b.opnorm**r


def trace_poly(
    a: HermitianMatrix, b: HermitianMatrix, p: int, r_max: int | None = None
) -> TracePolynomial:
    """All coefficients of x -> Tr (A + x B)^p up to degree r_max (default p)."""
    same_dim(a, b)
    if p < 0:
        raise DomainError(f"exponent must be non-negative, got {p}")
    if r_max is None:
        r_max = p
    if not 0 <= r_max <= p:
        raise DomainError(f"r_max must be in 0..{p}, got {r_max}")
    raw = kernels.poly_traces(a.data, b.data, p, r_max)
    coeffs = np.empty(r_max + 1)
    for r in range(r_max + 1):
        scale = coeff_scale(a, b, p, r)
        if abs(raw[r].imag) > IM_RESIDUE_TOL * scale:
            raise ImaginaryResidueError(
                f"coefficient r={r} has imaginary residue {raw[r].imag:.3e} "
                f"(scale {scale:.3e})"
            )
        coeffs[r] = raw[r].real
    return TracePolynomial(p, coeffs, r_max)


def derivative_at_zero(a: HermitianMatrix, b: HermitianMatrix, p: int, r: int) -> float:
    """r-th derivative of x -> Tr (A + x B)^p at x = 0, i.e. r! times the coefficient."""
    if r < 0:
        raise DomainError(f"derivative order must be non-negative, got {r}")
    if r > p:
        warnings.warn(f"derivative order {r} exceeds exponent {p}; result is exactly 0")
        return 0.0
    poly = trace_poly(a, b, p, r_max=r)
    return math.factorial(r) * float(poly.coeffs[r])


def coeff_gradient(
    a: HermitianMatrix, b: HermitianMatrix, p: int, r: int
) -> tuple[HermitianMatrix, HermitianMatrix]:
    """Hermitian gradients (gA, gB) of the coefficient of x^r in Tr (A + x B)^p.

    They satisfy d/dt c(A + t H, B) |_(t=0) = Re Tr(gA H) for every Hermitian
    direction H, and likewise for gB; the gradient lives in the Hermitian
    tangent space, matching the search parametrization.
    """
    same_dim(a, b)
    if p < 1:
        raise DomainError(f"exponent must be at least 1, got {p}")
    if not 0 <= r <= p:
        raise DomainError(f"coefficient index must be in 0..{p}, got {r}")
    raw_a, raw_b = kernels.poly_coeff_adjoint(a.data, b.data, p, r)
    return hermitian(raw_a), hermitian(raw_b)
