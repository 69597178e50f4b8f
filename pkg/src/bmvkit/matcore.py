"""Dense Hermitian matrices: construction, random instances, matrix functions.

All matrices are small (n <= 64 by design) and stored as full complex128
arrays. Values are immutable after construction and safe to share; randomness
always flows through an explicit :class:`~bmvkit.rng.Stream`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, DomainError
from .exact import ExactMatrix, rect_gram
from .rng import Stream

HERMITIAN = "hermitian"
POSITIVE = "positive"
POSITIVE_DEFINITE = "positive-definite"
CLASSIFICATIONS = (HERMITIAN, POSITIVE, POSITIVE_DEFINITE)

# relative eigenvalue floor accepted for the "positive" classification
PSD_TOL = 1e-10


@dataclass(frozen=True)
class HermitianMatrix:
    """An n x n complex Hermitian matrix with an advisory positivity flag.

    ``data`` is exactly conjugate-symmetric (enforced by construction) and
    read-only. ``classification`` is metadata checked at use sites, not a hard
    type guarantee. ``exact`` optionally carries the same matrix over the
    Gaussian rationals; ``origin`` records the (seed, stream) pair of the
    random draw that produced it.
    """

    data: np.ndarray
    classification: str = HERMITIAN
    exact: ExactMatrix | None = None
    origin: tuple[int, int] | None = None

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @cached_property
    def opnorm(self) -> float:
        """Largest |eigenvalue|."""
        if self.n == 0:
            return 0.0
        return float(np.max(np.abs(np.linalg.eigvalsh(self.data))))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.data)

    def __repr__(self) -> str:
        return f"HermitianMatrix(n={self.n}, classification={self.classification!r})"


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition: ascending eigenvalues and a unitary eigenbasis."""

    eigenvalues: np.ndarray
    basis: np.ndarray


def _symmetrize(m: np.ndarray) -> np.ndarray:
    # (M + M*)/2 is bitwise conjugate-symmetric in IEEE arithmetic
    h = (m + m.conj().T) / 2
    h.flags.writeable = False
    return h


def hermitian(
    entries,
    classification: str = HERMITIAN,
    exact: ExactMatrix | None = None,
    origin: tuple[int, int] | None = None,
) -> HermitianMatrix:
    """Build a HermitianMatrix, symmetrizing the input entries."""
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] == 0:
        raise DimensionMismatch("dimension must be at least 1")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise DomainError("matrix entries must be finite")
    if classification not in CLASSIFICATIONS:
        raise DomainError(f"unknown classification {classification!r}")
    return HermitianMatrix(_symmetrize(m), classification, exact, origin)


def identity(n: int, classification: str = POSITIVE_DEFINITE) -> HermitianMatrix:
    return hermitian(np.eye(n, dtype=np.complex128), classification)


def diagonal(values, classification: str | None = None) -> HermitianMatrix:
    v = np.asarray(values, dtype=np.float64)
    if classification is None:
        if np.all(v > 0):
            classification = POSITIVE_DEFINITE
        elif np.all(v >= 0):
            classification = POSITIVE
        else:
            classification = HERMITIAN
    return hermitian(np.diag(v.astype(np.complex128)), classification)


def random_hermitian(n: int, rng: Stream) -> HermitianMatrix:
    """Symmetrized i.i.d. standard complex Gaussian matrix; deterministic per stream."""
    if n < 1:
        raise DimensionMismatch("dimension must be at least 1")
    g = rng.generator()
    m = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
    return hermitian(m / np.sqrt(2.0), HERMITIAN, origin=rng.as_tuple())


def random_psd(n: int, rank: int, rng: Stream, exact: bool = False) -> HermitianMatrix:
    """G  G* for an n x rank Gaussian factor; small Gaussian-integer G when exact.

    Exact mode yields entries that are exactly representable rationals
    (Gaussian integers), so the instance can feed the certification path.
    """
    if n < 1:
        raise DimensionMismatch("dimension must be at least 1")
    if rank < 1 or rank > n:
        raise DomainError(f"rank must be in 1..{n}, got {rank}")
    g = rng.generator()
    if exact:
        re = g.integers(-2, 3, size=(n, rank))
        im = g.integers(-2, 3, size=(n, rank))
        em = rect_gram(
            [[Fraction(int(x)) for x in row] for row in re],
            [[Fraction(int(x)) for x in row] for row in im],
        )
        return hermitian(em.to_complex(), POSITIVE, exact=em, origin=rng.as_tuple())
    factor = (g.standard_normal((n, rank)) + 1j * g.standard_normal((n, rank))) / np.sqrt(2.0)
    return hermitian(factor @ factor.conj().T, POSITIVE, origin=rng.as_tuple())


def random_pd(n: int, rng: Stream, ridge: float = 0.25) -> HermitianMatrix:
    """Well-conditioned random positive-definite matrix (Gram plus scaled identity)."""
    base = random_psd(n, n, rng)
    shift = ridge * (1.0 + float(np.trace(base.data).real) / n)
    m = base.data + shift * np.eye(n)
    return hermitian(m, POSITIVE_DEFINITE, origin=rng.as_tuple())


def eigh(m: HermitianMatrix) -> Spectrum:
    """Eigendecomposition with ascending eigenvalues and unitary basis."""
    w, v = np.linalg.eigh(m.data)
    return Spectrum(w, v)


def _apply_spectral(spec: Spectrum, f_of_w: np.ndarray) -> np.ndarray:
    return _symmetrize((spec.basis * f_of_w) @ spec.basis.conj().T)


def matfn(m: HermitianMatrix, fn: str, q: float | None = None) -> HermitianMatrix:
    """f(M) through the eigendecomposition, for f in {exp, power(q), inv_sqrt}.

    power(q) with q < 0 and inv_sqrt require positive-definite input; a
    non-integer q >= 0 requires positive-semidefinite input (eigenvalues within
    the PSD tolerance are clamped to zero).
    """
    spec = eigh(m)
    w = spec.eigenvalues
    scale = float(np.max(np.abs(w))) if m.n else 0.0
    if fn == "exp":
        fw = np.exp(w)
    elif fn == "inv_sqrt":
        _require_pd(w, "inv_sqrt")
        fw = 1.0 / np.sqrt(w)
    elif fn == "power":
        if q is None:
            raise DomainError("power requires an exponent q")
        q = float(q)
        if q < 0:
            _require_pd(w, f"power({q})")
            fw = w**q
        elif q == int(q):
            fw = w ** int(q)
        else:
            floor = -PSD_TOL * max(scale, 1e-300)
            wc = np.where((w < 0) & (w >= floor), 0.0, w)
            if np.any(wc < 0):
                bad = float(wc[wc < 0][0])
                raise DomainError(f"power({q}) of a negative eigenvalue {bad:.6g}")
            fw = wc**q
    else:
        raise DomainError(f"unknown matrix function {fn!r}")
    out = _apply_spectral(spec, fw)
    if np.all(fw > 0):
        cls = POSITIVE_DEFINITE
    elif np.all(fw >= 0):
        cls = POSITIVE
    else:
        cls = HERMITIAN
    return HermitianMatrix(out, cls)


def _require_pd(w: np.ndarray, what: str) -> None:
    if w[0] <= 0:
        raise DomainError(f"{what} requires positive-definite input; smallest eigenvalue {float(w[0]):.6g}")


def dual_pair(a: HermitianMatrix, b: HermitianMatrix) -> tuple[HermitianMatrix, HermitianMatrix]:
    """Map (a, b), a positive-definite, to (a^-1, a^-1/2 b a^-1/2).

    This congruence couples the derivatives of Tr (a + x b)^-p at x = 0 to the
    coefficients of the polynomial Tr (A + x B)^(p+r). The second output is
    positive exactly when b is.
    """
    if a.n != b.n:
        raise DimensionMismatch(f"dimension mismatch: {a.n} vs {b.n}")
    spec = eigh(a)
    w = spec.eigenvalues
    _require_pd(w, "dual_pair")
    inv = _apply_spectral(spec, 1.0 / w)
    half = _apply_spectral(spec, 1.0 / np.sqrt(w))
    big_a = HermitianMatrix(inv, POSITIVE_DEFINITE)
    cls = b.classification if b.classification in (POSITIVE, POSITIVE_DEFINITE) else HERMITIAN
    big_b = hermitian(half @ b.data @ half, cls)
    return big_a, big_b


def same_dim(*ms: HermitianMatrix) -> int:
    n = ms[0].n
    for m in ms[1:]:
        if m.n != n:
            raise DimensionMismatch(f"dimension mismatch: {n} vs {m.n}")
    return n
