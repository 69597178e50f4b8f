"""Numerical embodiment of the three equivalent positivity statements.

Covers the two-sided derivative identity linking Tr (a + x b)^-p to the
coefficients of Tr (A + x B)^(p+r), complete-monotonicity probes of
Tr exp(A - x B) and Tr (A + x B)^-p, the shifted exponential-series identity,
the Gamma-integral representation of inverse powers, and the 2x2
non-negative-basis construction.

Probes report; they assert nothing about the open n >= 3 cases.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, DomainError, ImaginaryResidueError
from .matcore import (
    POSITIVE,
    HermitianMatrix,
    Spectrum,
    eigh,
    hermitian,
    matfn,
    dual_pair,
    same_dim,
    PSD_TOL,
)
from .numdiff import derivative as fd_derivative
from .tracepoly import derivative_at_zero

# hard overflow guard for anything exponentiated: |A| + |x| |B| must stay below this
EXP_NORM_GUARD = 200.0
SERIES_TARGET = 1e-10
IM_RESIDUE_TOL = 1e-9


@dataclass(frozen=True)
class Composition:
    """An ordered tuple of positive integers with a prescribed sum."""

    parts: tuple[int, ...]

    def __post_init__(self):
        if any(p < 1 for p in self.parts):
            raise DomainError("composition parts must be positive")

    @property
    def total(self) -> int:
        return sum(self.parts)


def compositions(total: int, num_parts: int) -> Iterator[tuple[int, ...]]:
    """All compositions of ``total`` into ``num_parts`` positive parts, lexicographic."""
    if num_parts < 1 or total < num_parts:
        return
    # stars and bars: cut points between 1 and total-1
    for cuts in itertools.combinations(range(1, total), num_parts - 1):
        prev = 0
        parts = []
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(total - prev)
        yield tuple(parts)


def composition_count(total: int, num_parts: int) -> int:
    if num_parts < 1 or total < num_parts:
        return 0
    return math.comb(total - 1, num_parts - 1)


def _psd_check(m: HermitianMatrix, what: str) -> None:
    w = m.eigenvalues()
    if w[0] < -PSD_TOL * max(m.opnorm, 1e-300):
        raise DomainError(f"{what} must be positive; smallest eigenvalue {float(w[0]):.6g}")


def _pd_spectrum(m: HermitianMatrix, what: str) -> Spectrum:
    spec = eigh(m)
    if spec.eigenvalues[0] <= 0:
        raise DomainError(
            f"{what} must be positive-definite; smallest eigenvalue "
            f"{float(spec.eigenvalues[0]):.6g}"
        )
    return spec


def _inverse_power_terms(
    a: HermitianMatrix, b: HermitianMatrix, p: int, r: int
) -> tuple[complex, float]:
    """(sum of composition-term traces, sum of their absolute values).

    Terms are Tr(a^-i1 b ... b a^-i(r+1)) over compositions of p + r into
    r + 1 positive parts; the r-th derivative at 0 is (-1)^r r! times the sum.
    """
    spec = _pd_spectrum(a, "base point")
    u = spec.basis
    w = spec.eigenvalues
    # memoized inverse powers a^-k, largest part is p
    powers = [None] * (p + 1)
    for k in range(1, p + 1):
        powers[k] = (u * w ** (-float(k))) @ u.conj().T
    qmats = [None] * (p + 1)
    for k in range(1, p + 1):
        qmats[k] = powers[k] @ b.data
    total = 0.0 + 0.0j
    scale = 0.0
    for comp in compositions(p + r, r + 1):
        if r == 0:
            cur = powers[comp[0]]
        else:
            cur = qmats[comp[0]]
            for part in comp[1:-1]:
                cur = cur @ qmats[part]
            cur = cur @ powers[comp[-1]]
        t = complex(np.trace(cur))
        total += t
        scale += abs(t)
    return total, scale


def inverse_power_derivative(a: HermitianMatrix, b: HermitianMatrix, p: int, r: int) -> float:
    """r-th derivative of x -> Tr (a + x b)^-p at x = 0, a positive-definite."""
    same_dim(a, b)
    if r < 0:
        raise DomainError(f"derivative order must be non-negative, got {r}")
    if p < 0:
        raise DomainError(f"power must be non-negative, got {p}")
    if p == 0:
        # constant function Tr I = n
        return float(a.n) if r == 0 else 0.0
    total, scale = _inverse_power_terms(a, b, p, r)
    if abs(total.imag) > IM_RESIDUE_TOL * max(scale, 1e-300):
        raise ImaginaryResidueError(
            f"inverse-power derivative has imaginary residue {total.imag:.3e}"
        )
    return (-1.0) ** r * math.factorial(r) * total.real


@dataclass(frozen=True)
class DualityReport:
    """Two-sided evaluation of the inverse-power / coefficient identity."""

    p: int
    r: int
    lhs: float
    rhs: float
    abs_residual: float
    rel_residual: float
    scale: float
    tol: float
    passed: bool


def duality_identity_check(
    a: HermitianMatrix, b: HermitianMatrix, p: int, r: int, tol: float = 1e-8
) -> DualityReport:
    """Check d^r/dx^r Tr (a + x b)^-p |_0 = p/(p+r) (-1)^r d^r/dx^r Tr (A + x B)^(p+r) |_0.

    The left side is the composition sum; the right side goes through the
    dual pair (A, B) = (a^-1, a^-1/2 b a^-1/2) and the polynomial-coefficient
    recurrence -- two independent computation paths.
    """
    same_dim(a, b)
    if p < 1:
        raise DomainError(f"power must be at least 1, got {p}")
    if r < 0:
        raise DomainError(f"derivative order must be non-negative, got {r}")
    total, scale = _inverse_power_terms(a, b, p, r)
    pref = math.factorial(r)
    lhs = (-1.0) ** r * pref * total.real
    scale = pref * scale
    big_a, big_b = dual_pair(a, b)
    rhs = (p / (p + r)) * (-1.0) ** r * derivative_at_zero(big_a, big_b, p + r, r)
    abs_res = abs(lhs - rhs)
    rel_res = abs_res / max(scale, 1e-300) if abs_res else 0.0
    return DualityReport(p, r, lhs, rhs, abs_res, rel_res, scale, tol, rel_res <= tol)


def _guard_exp_norm(a: HermitianMatrix, b: HermitianMatrix, lam: float) -> None:
    if a.opnorm + abs(lam) * b.opnorm > EXP_NORM_GUARD:
        raise DomainError(
            f"|A| + |x| |B| = {a.opnorm + abs(lam) * b.opnorm:.3g} exceeds the "
            f"overflow guard {EXP_NORM_GUARD}"
        )


def exp_trace_derivatives(
    a: HermitianMatrix, b: HermitianMatrix, r_max: int, lam: float
) -> np.ndarray:
    """Derivatives d^j/dx^j Tr exp(A - x B) at x = lam, for all j = 0..r_max.

    Block-augmentation method: exponentiate the (r_max+1) n-block upper
    bidiagonal matrix with A - lam B on the diagonal and -B above it; the
    (1, j+1) block of the result is the j-th directional term divided by j!.
    """
    same_dim(a, b)
    if r_max < 0:
        raise DomainError(f"derivative order must be non-negative, got {r_max}")
    _guard_exp_norm(a, b, lam)
    n = a.n
    x = a.data - lam * b.data
    m = np.zeros(((r_max + 1) * n, (r_max + 1) * n), dtype=np.complex128)
    for j in range(r_max + 1):
        m[j * n : (j + 1) * n, j * n : (j + 1) * n] = x
        if j < r_max:
            m[j * n : (j + 1) * n, (j + 1) * n : (j + 2) * n] = -b.data
    e = scipy.linalg.expm(m)
    out = np.empty(r_max + 1)
    for j in range(r_max + 1):
        block = e[0:n, j * n : (j + 1) * n]
        out[j] = math.factorial(j) * float(np.trace(block).real)
    return out


def exp_trace_derivative(a: HermitianMatrix, b: HermitianMatrix, r: int, lam: float) -> float:
    """r-th derivative of x -> Tr exp(A - x B) at x = lam."""
    return float(exp_trace_derivatives(a, b, r, lam)[r])


def exp_trace_value(a: HermitianMatrix, b: HermitianMatrix, lam: float) -> float:
    """Tr exp(A - x B) through the eigendecomposition (independent of expm)."""
    shifted = hermitian(a.data - lam * b.data)
    return float(np.trace(matfn(shifted, "exp").data).real)


def inverse_power_value(a: HermitianMatrix, b: HermitianMatrix, p: float, lam: float) -> float:
    """Tr (A + x B)^-p at x = lam through the eigendecomposition."""
    w = np.linalg.eigvalsh(a.data + lam * b.data)
    if w[0] <= 0:
        raise DomainError(f"A + x B singular at x = {lam}; smallest eigenvalue {w[0]:.6g}")
    return float(np.sum(w ** (-float(p))))


@dataclass(frozen=True)
class CMReport:
    """Signed derivative table of a complete-monotonicity probe.

    ``values[i, r]`` holds (-1)^r f^(r)(lambda_grid[i]); a violation is an
    entry below -tol * scale(r), where scale(r) estimates the magnitude of
    order-r entries. ``crosscheck_dev`` is the worst relative deviation of the
    spot finite-difference checks.
    """

    mode: str
    lambda_grid: np.ndarray
    orders: tuple[int, ...]
    values: np.ndarray
    scales: np.ndarray
    min_signed_value: float
    violations: list[tuple[float, int, float]]
    tol: float
    crosscheck_dev: float = 0.0


def _finish_report(
    mode: str,
    grid: np.ndarray,
    values: np.ndarray,
    scales: np.ndarray,
    tol: float,
    crosscheck_dev: float,
) -> CMReport:
    r_max = values.shape[1] - 1
    violations = []
    for i, lam in enumerate(grid):
        for r in range(r_max + 1):
            if values[i, r] < -tol * scales[r]:
                violations.append((float(lam), r, float(values[i, r])))
    return CMReport(
        mode=mode,
        lambda_grid=grid,
        orders=tuple(range(r_max + 1)),
        values=values,
        scales=scales,
        min_signed_value=float(values.min()),
        violations=violations,
        tol=tol,
        crosscheck_dev=crosscheck_dev,
    )


def _validate_grid(lambda_grid) -> np.ndarray:
    grid = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    if grid.size == 0:
        raise DomainError("lambda grid must be non-empty")
    if np.any(grid < 0):
        raise DomainError("lambda grid values must be non-negative")
    return grid


def cm_probe_exp(
    a: HermitianMatrix,
    b: HermitianMatrix,
    r_max: int,
    lambda_grid,
    tol: float = 1e-10,
) -> CMReport:
    """Probe complete monotonicity of x -> Tr exp(A - x B) on a grid.

    Requires B positive. Values are spot-checked against Richardson finite
    differences of the eigendecomposition path.
    """
    same_dim(a, b)
    _psd_check(b, "B")
    grid = _validate_grid(lambda_grid)
    values = np.empty((grid.size, r_max + 1))
    for i, lam in enumerate(grid):
        d = exp_trace_derivatives(a, b, r_max, float(lam))
        values[i] = [(-1.0) ** r * d[r] for r in range(r_max + 1)]
    scales = np.maximum(np.abs(values).max(axis=0), 1e-300)
    dev = _exp_spot_check(a, b, grid, values, r_max)
    return _finish_report("exp", grid, values, scales, tol, dev)


def _exp_spot_check(a, b, grid, values, r_max) -> float:
    spots = [(0, min(2, r_max))]
    if grid.size > 1 and r_max >= 1:
        spots.append((grid.size - 1, 1))
    h0 = 0.2 / max(1.0, b.opnorm)
    worst = 0.0
    for i, r in spots:
        lam = float(grid[i])
        fd, _ = fd_derivative(lambda t: exp_trace_value(a, b, t), lam, r, h0)
        block = (-1.0) ** r * values[i, r]
        denom = max(abs(block), abs(fd), 1e-12 * max(abs(values[i, 0]), 1.0))
        worst = max(worst, abs(block - fd) / denom)
    return worst


def cm_probe_invpow(
    a: HermitianMatrix,
    b: HermitianMatrix,
    p: int,
    r_max: int,
    lambda_grid=(0.0,),
    tol: float = 1e-10,
) -> CMReport:
    """Probe complete monotonicity of x -> Tr (A + x B)^-p, integer p >= 0.

    Derivatives at x > 0 come from re-basing a <- A + x B, which the
    composition formula permits at any positive-definite base point.
    """
    same_dim(a, b)
    if p < 0 or p != int(p):
        raise DomainError(f"power must be a non-negative integer, got {p}")
    _psd_check(b, "B")
    grid = _validate_grid(lambda_grid)
    values = np.empty((grid.size, r_max + 1))
    scales = np.zeros(r_max + 1)
    for i, lam in enumerate(grid):
        base = hermitian(a.data + float(lam) * b.data)
        if np.linalg.eigvalsh(base.data)[0] <= 0:
            raise DomainError(f"A + x B singular at x = {lam}")
        for r in range(r_max + 1):
            if p == 0:
                values[i, r] = float(a.n) if r == 0 else 0.0
                scales[r] = max(scales[r], abs(values[i, r]))
                continue
            total, scale = _inverse_power_terms(base, b, int(p), r)
            pref = math.factorial(r)
            # (-1)^r from the derivative cancels the probe's (-1)^r sign
            values[i, r] = pref * total.real
            scales[r] = max(scales[r], pref * scale)
    scales = np.maximum(scales, 1e-300)
    dev = _invpow_spot_check(a, b, p, grid, values, r_max)
    return _finish_report("invpow", grid, values, scales, tol, dev)


def _invpow_spot_check(a, b, p, grid, values, r_max) -> float:
    if p == 0:
        return 0.0
    spots = [(0, min(2, r_max))]
    worst = 0.0
    for i, r in spots:
        lam = float(grid[i])
        wmin = float(np.linalg.eigvalsh(a.data + lam * b.data)[0])
        h0 = min(0.1, 0.05 * wmin / max(b.opnorm, 1e-12))
        if h0 <= 0:
            continue
        fd, _ = fd_derivative(lambda t: inverse_power_value(a, b, p, t), lam, r, h0)
        got = (-1.0) ** r * values[i, r]
        denom = max(abs(got), abs(fd), 1e-12 * max(abs(values[i, 0]), 1.0))
        worst = max(worst, abs(got - fd) / denom)
    return worst


def cm_probe_general_f(
    a: HermitianMatrix,
    b: HermitianMatrix,
    mixture: Sequence[tuple[float, float]],
    lambda_grid,
    r_max: int,
    tol: float = 1e-10,
) -> CMReport:
    """Probe x -> Tr f(A + x B) for f(y) = sum of w_k exp(-t_k y), w_k, t_k >= 0.

    Linearity reduces every derivative to exponential-trace derivatives of the
    pairs (-t_k A, t_k B).
    """
    same_dim(a, b)
    if len(mixture) == 0:
        raise DomainError("mixture must be non-empty")
    for wk, tk in mixture:
        if wk < 0 or tk < 0:
            raise DomainError(f"mixture weights and decays must be non-negative, got ({wk}, {tk})")
    _psd_check(a, "A")
    _psd_check(b, "B")
    grid = _validate_grid(lambda_grid)
    pairs = [
        (float(wk), hermitian(-float(tk) * a.data), hermitian(float(tk) * b.data, POSITIVE))
        for wk, tk in mixture
    ]
    values = np.zeros((grid.size, r_max + 1))
    scales = np.zeros(r_max + 1)
    for i, lam in enumerate(grid):
        contrib = np.zeros(r_max + 1)
        absum = np.zeros(r_max + 1)
        for wk, ak, bk in pairs:
            d = exp_trace_derivatives(ak, bk, r_max, float(lam))
            contrib += wk * d
            absum += wk * np.abs(d)
        values[i] = [(-1.0) ** r * contrib[r] for r in range(r_max + 1)]
        scales = np.maximum(scales, absum)
    scales = np.maximum(scales, 1e-300)
    return _finish_report("mixture", grid, values, scales, tol, 0.0)


@dataclass(frozen=True)
class SeriesReport:
    """Shifted exponential-series check of Tr exp(A - x B)."""

    lhs: float
    rhs_partial: float
    abs_error: float
    k_used: int
    k_cap: int
    converged: bool


def series_identity_check(
    a: HermitianMatrix, b: HermitianMatrix, lam: float, k_cap: int
) -> SeriesReport:
    """Compare Tr exp(A - x B) with e^-|A| sum_k Tr (A + |A| I - x B)^k / k!.

    Reports the first K with relative gap <= 1e-10, or the cap. Terms use the
    running power of the fixed shifted matrix.
    """
    same_dim(a, b)
    if k_cap < 1:
        raise DomainError(f"series cap must be at least 1, got {k_cap}")
    _guard_exp_norm(a, b, lam)
    lhs = exp_trace_value(a, b, lam)
    nrm = a.opnorm
    shift = a.data + nrm * np.eye(a.n) - lam * b.data
    damp = math.exp(-nrm)
    term = np.eye(a.n, dtype=np.complex128)
    partial = float(a.n)
    k_used = k_cap
    converged = False
    rhs = damp * partial
    for k in range(1, k_cap + 1):
        term = term @ shift / k
        partial += float(np.trace(term).real)
        rhs = damp * partial
        if abs(lhs - rhs) <= SERIES_TARGET * abs(lhs):
            k_used = k
            converged = True
            break
    return SeriesReport(lhs, rhs, abs(lhs - rhs), k_used, k_cap, converged)


@dataclass(frozen=True)
class QuadratureReport:
    """Gamma-integral representation check of Tr (A + x B)^-p."""

    direct: float
    quadrature: float
    rel_error: float
    nodes: int


@lru_cache(maxsize=64)
def _laguerre_rule(nodes: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    # weight t^alpha e^-t absorbs the power factor, leaving an entire integrand
    return scipy.special.roots_genlaguerre(nodes, alpha)


def laplace_rep_check(
    a: HermitianMatrix, b: HermitianMatrix, lam: float, p: float, nodes: int
) -> QuadratureReport:
    """Check Tr (A + x B)^-p against its Gamma-integral Gauss-Laguerre quadrature.

    The integrand is conditioned by substituting t -> t / mu_min (mu_min the
    smallest eigenvalue of A + x B) and by folding the t^(p-1) factor into the
    generalized Gauss-Laguerre weight.
    """
    same_dim(a, b)
    if p <= 0:
        raise DomainError(f"power must be positive, got {p}")
    if nodes < 1:
        raise DomainError(f"node count must be positive, got {nodes}")
    w = np.linalg.eigvalsh(a.data + lam * b.data)
    if w[0] <= 0:
        raise DomainError(f"A + x B must be positive-definite; smallest eigenvalue {w[0]:.6g}")
    direct = float(np.sum(w ** (-float(p))))
    t, wt = _laguerre_rule(nodes, float(p) - 1.0)
    mu = float(w[0])
    ratios = w / mu - 1.0
    vals = np.sum(np.exp(-np.outer(t, ratios)), axis=1)
    integral = float(np.sum(wt * vals))
    quadrature = mu ** (-float(p)) * integral / math.gamma(p)
    rel = abs(direct - quadrature) / abs(direct)
    return QuadratureReport(direct, quadrature, rel, nodes)


def nonneg_basis_2x2(
    a: HermitianMatrix, b: HermitianMatrix
) -> tuple[np.ndarray, HermitianMatrix, HermitianMatrix]:
    """Unitary U making both 2x2 positive matrices entrywise non-negative.

    Diagonalize A (its diagonal form is entrywise non-negative), then rotate
    the phase of the second basis vector so the off-diagonal entry of the
    transformed B becomes its modulus. Returns (U, U* A U, U* B U).
    """
    if a.n != 2 or b.n != 2:
        raise DimensionMismatch("non-negative basis construction is 2x2 only")
    _psd_check(a, "A")
    _psd_check(b, "B")
    spec = eigh(a)
    u0 = spec.basis
    b1 = u0.conj().T @ b.data @ u0
    off = b1[0, 1]
    phase = np.exp(-1j * np.angle(off)) if off != 0 else 1.0 + 0.0j
    d = np.diag([1.0 + 0.0j, phase])
    u = u0 @ d
    a2 = np.diag(spec.eigenvalues).astype(np.complex128)
    b2 = d.conj().T @ b1 @ d
    return u, hermitian(a2, POSITIVE), hermitian(b2, POSITIVE)
