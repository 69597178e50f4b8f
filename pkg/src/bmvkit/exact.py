"""Exact Gaussian-rational matrix arithmetic.

Entries are complex numbers with ``fractions.Fraction`` real and imaginary
parts, so Hermitian instances built from integer or dyadic-rational Gram
factors can be multiplied and traced with zero rounding error. Used by the
exact coefficient oracles and by counterexample certification.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DimensionMismatch

Rational = Fraction


class ExactMatrix:
    """Dense square matrix over the Gaussian rationals.

    Immutable by convention: operations return new instances. ``re`` and
    ``im`` are tuples of tuples of Fractions.
    """

    __slots__ = ("re", "im", "n")

    def __init__(self, re, im):
        self.re = tuple(tuple(Fraction(x) for x in row) for row in re)
        self.im = tuple(tuple(Fraction(x) for x in row) for row in im)
        self.n = len(self.re)
        if any(len(row) != self.n for row in self.re) or len(self.im) != self.n:
            raise DimensionMismatch("exact matrix must be square")

    @classmethod
    def zeros(cls, n: int) -> "ExactMatrix":
        z = [[Fraction(0)] * n for _ in range(n)]
        return cls(z, z)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        re = [[Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        im = [[Fraction(0)] * n for _ in range(n)]
        return cls(re, im)

    @classmethod
    def from_gram(cls, factor: "ExactMatrix") -> "ExactMatrix":
        """G  G* for a (possibly non-square-content) factor; exactly Hermitian."""
        return factor @ factor.conj_t()

    def conj_t(self) -> "ExactMatrix":
        n = self.n
        re = [[self.re[j][i] for j in range(n)] for i in range(n)]
        im = [[-self.im[j][i] for j in range(n)] for i in range(n)]
        return ExactMatrix(re, im)

    def is_hermitian(self) -> bool:
        n = self.n
        return all(
            self.re[i][j] == self.re[j][i] and self.im[i][j] == -self.im[j][i]
            for i in range(n)
            for j in range(n)
        )

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.n != other.n:
            raise DimensionMismatch(f"exact matmul: {self.n} vs {other.n}")
        n = self.n
        are, aim, bre, bim = self.re, self.im, other.re, other.im
        re = [[Fraction(0)] * n for _ in range(n)]
        im = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for k in range(n):
                ar, ai = are[i][k], aim[i][k]
                if not ar and not ai:
                    continue
                brow, birow = bre[k], bim[k]
                rrow, irow = re[i], im[i]
                for j in range(n):
                    rrow[j] += ar * brow[j] - ai * birow[j]
                    irow[j] += ar * birow[j] + ai * brow[j]
        return ExactMatrix(re, im)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ExactMatrix)
            and self.re == other.re
            and self.im == other.im
        )

    def __hash__(self):
        return hash((self.re, self.im))

    def trace(self) -> tuple[Fraction, Fraction]:
        """(real, imaginary) parts of the trace, exactly."""
        tre = sum((self.re[i][i] for i in range(self.n)), Fraction(0))
        tim = sum((self.im[i][i] for i in range(self.n)), Fraction(0))
        return tre, tim

    def scale(self, c: Fraction) -> "ExactMatrix":
        c = Fraction(c)
        return ExactMatrix(
            [[c * x for x in row] for row in self.re],
            [[c * x for x in row] for row in self.im],
        )

    def to_complex(self) -> np.ndarray:
        out = np.empty((self.n, self.n), dtype=np.complex128)
        for i in range(self.n):
            for j in range(self.n):
                out[i, j] = float(self.re[i][j]) + 1j * float(self.im[i][j])
        return out

    def max_denominator(self) -> int:
        dens = [x.denominator for row in self.re for x in row]
        dens += [x.denominator for row in self.im for x in row]
        return max(dens)


def rect_gram(re_rows, im_rows) -> ExactMatrix:
    """G  G* for a rectangular n x k rational factor given as row lists."""
    n = len(re_rows)
    k = len(re_rows[0]) if n else 0
    re = [[Fraction(0)] * n for _ in range(n)]
    im = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sre = Fraction(0)
            sim = Fraction(0)
            for t in range(k):
                # g[i,t] * conj(g[j,t])
                ar, ai = re_rows[i][t], im_rows[i][t]
                br, bi = re_rows[j][t], -im_rows[j][t]
                sre += ar * br - ai * bi
                sim += ar * bi + ai * br
            re[i][j] = sre
            im[i][j] = sim
    return ExactMatrix(re, im)


def dyadic(x: float, bits: int) -> Fraction:
    """Nearest fraction with denominator 2**bits; exact in binary floating point."""
    scale = 1 << bits
    return Fraction(round(x * scale), scale)


def dyadic_matrix(data: np.ndarray, bits: int) -> ExactMatrix:
    """Round a complex array entrywise to dyadic rationals."""
    re = [[dyadic(float(x.real), bits) for x in row] for row in data]
    im = [[dyadic(float(x.imag), bits) for x in row] for row in data]
    return ExactMatrix(re, im)
