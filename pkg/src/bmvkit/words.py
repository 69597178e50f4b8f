"""Words over {A, B}, necklaces, and the exact coefficient oracles.

The coefficient of x^r in Tr (A + x B)^p equals the sum of Tr(w) over all
words w of length p with r letters B. Cyclicity of the trace lets the sum be
grouped by rotation classes (necklaces), each contributing its orbit size
times one representative trace. Both groupings are implemented here, in
floating point and in exact Gaussian-rational arithmetic, and serve as the
ground truth against the fast recurrence engine.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

from . import _kernels as kernels
from .errors import DomainError, ExactInputError
from .matcore import HermitianMatrix, same_dim

# caps keep the oracles' worst case around a minute at n <= 4
BRUTE_MAX_P = 22
NECKLACE_MAX_P = 26
# canonicalize-everything is obviously correct; the CAT generator takes over above
_CANONICAL_MAX_P = 14


@dataclass(frozen=True)
class BinaryWord:
    """A word over the alphabet {A, B}; serialization is the letter string."""

    letters: str

    def __post_init__(self):
        if any(c not in "AB" for c in self.letters):
            raise DomainError(f"word must use letters A/B only, got {self.letters!r}")

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of B's."""
        return self.letters.count("B")

    def rotate(self, k: int) -> "BinaryWord":
        k %= max(self.length, 1)
        return BinaryWord(self.letters[k:] + self.letters[:k])

    def codes(self) -> np.ndarray:
        return np.frombuffer(self.letters.encode(), dtype=np.uint8) - ord("A")

    def __str__(self) -> str:
        return self.letters


@dataclass(frozen=True)
class NecklaceClass:
    """A cyclic-equivalence class of words.

    ``representative`` is the lexicographically least rotation; ``orbit_size``
    is the number of distinct rotations, i.e. the smallest period.
    """

    representative: BinaryWord
    orbit_size: int


def _check_pr(p: int, r: int) -> None:
    if p < 0 or r < 0 or r > p:
        raise DomainError(f"need 0 <= r <= p, got p={p}, r={r}")


def enumerate_words(p: int, r: int) -> Iterator[BinaryWord]:
    """All binomial(p, r) words of length p with r B's, in lexicographic order."""
    _check_pr(p, r)
    # choosing the A-positions in lexicographic tuple order yields string order
    for a_positions in itertools.combinations(range(p), p - r):
        letters = ["B"] * p
        for i in a_positions:
            letters[i] = "A"
        yield BinaryWord("".join(letters))


def _min_rotation(s: str) -> tuple[str, int]:
    """(least rotation, number of distinct rotations)."""
    rots = {s[k:] + s[:k] for k in range(len(s))}
    return min(rots), len(rots)


def _necklaces_by_canonicalization(p: int, r: int) -> list[NecklaceClass]:
    seen: dict[str, int] = {}
    for w in enumerate_words(p, r):
        rep, orbit = _min_rotation(w.letters)
        if rep not in seen:
            seen[rep] = orbit
    return [NecklaceClass(BinaryWord(rep), orbit) for rep, orbit in sorted(seen.items())]


def _necklaces_fixed_content(p: int, r: int) -> list[NecklaceClass]:
    """FKM-style generation of binary necklaces with exactly r ones.

    Generates prenecklaces in lexicographic order and keeps the words whose
    length is a multiple of the current Lyndon-prefix length; that prefix
    length is the word's smallest period, hence the orbit size.
    """
    a = [0] * (p + 1)
    counts = [p - r, r]
    out: list[NecklaceClass] = []

    def gen(t: int, period: int) -> None:
        if t > p:
            if p % period == 0:
                letters = "".join("AB"[c] for c in a[1:])
                out.append(NecklaceClass(BinaryWord(letters), period))
            return
        lo = a[t - period]
        for j in (0, 1):
            if j >= lo and counts[j] > 0:
                counts[j] -= 1
                a[t] = j
                gen(t + 1, period if j == lo else t)
                counts[j] += 1

    gen(1, 1)
    return out


def necklaces(p: int, r: int) -> list[NecklaceClass]:
    """One class per rotation orbit of the (p, r) words; orbit sizes sum to binomial(p, r)."""
    _check_pr(p, r)
    if p < 1:
        raise DomainError("necklaces need p >= 1")
    if p <= _CANONICAL_MAX_P:
        return _necklaces_by_canonicalization(p, r)
    return _necklaces_fixed_content(p, r)


def _exact_pair(a: HermitianMatrix, b: HermitianMatrix):
    if a.exact is None or b.exact is None:
        raise ExactInputError("exact mode requires matrices with rational entries")
    return a.exact, b.exact


def _word_trace_exact(a: HermitianMatrix, b: HermitianMatrix, w: BinaryWord) -> tuple[Fraction, Fraction]:
    ea, eb = _exact_pair(a, b)
    mats = {"A": ea, "B": eb}
    if w.length == 0:
        return Fraction(a.n), Fraction(0)
    cur = mats[w.letters[0]]
    for c in w.letters[1:]:
        cur = cur @ mats[c]
    return cur.trace()


def word_trace(a: HermitianMatrix, b: HermitianMatrix, w: BinaryWord, exact: bool = False):
    """Trace of the ordered product the word spells, as a float (or Fraction).

    Returns the real part: for complex Hermitian inputs an individual word
    trace may be complex (its mirror word carries the conjugate), but every
    rotation-closed family used by the coefficient engines sums to a real
    value.
    """
    same_dim(a, b)
    if exact:
        return _word_trace_exact(a, b, w)[0]
    t = kernels.word_traces(a.data, b.data, w.codes()[None, :])
    return float(t[0].real)


def pairwise_sum(values: np.ndarray) -> complex:
    """Fixed-order pairwise tree reduction; reproducible regardless of chunking."""
    vals = np.asarray(values)
    m = len(vals)
    if m == 0:
        return 0.0 + 0.0j
    work = vals.astype(np.complex128, copy=True)
    while m > 1:
        half = m // 2
        work[:half] += work[m - half : m]
        m = m - half
    return complex(work[0])


def _codes_matrix(words: list[BinaryWord], p: int) -> np.ndarray:
    out = np.empty((len(words), p), dtype=np.uint8)
    for i, w in enumerate(words):
        out[i] = w.codes()
    return out


def coeff_bruteforce(a: HermitianMatrix, b: HermitianMatrix, p: int, r: int, exact: bool = False):
    """Sum of Tr(w) over every word of length p with r B's (the defining sum)."""
    _check_pr(p, r)
    same_dim(a, b)
    if p > BRUTE_MAX_P:
        raise DomainError(f"brute-force cap is p <= {BRUTE_MAX_P}, got {p}")
    if exact:
        total_re = Fraction(0)
        total_im = Fraction(0)
        for w in enumerate_words(p, r):
            tre, tim = _word_trace_exact(a, b, w)
            total_re += tre
            total_im += tim
        assert total_im == 0, "imaginary parts of mirror words must cancel exactly"
        return total_re
    words = list(enumerate_words(p, r))
    traces = kernels.word_traces(a.data, b.data, _codes_matrix(words, p))
    return float(pairwise_sum(traces).real)


def coeff_by_necklaces(a: HermitianMatrix, b: HermitianMatrix, p: int, r: int, exact: bool = False):
    """Necklace-grouped coefficient: sum of orbit_size * Tr(representative)."""
    _check_pr(p, r)
    same_dim(a, b)
    if p > NECKLACE_MAX_P:
        raise DomainError(f"necklace cap is p <= {NECKLACE_MAX_P}, got {p}")
    if p == 0:
        return Fraction(a.n) if exact else float(a.n)
    classes = necklaces(p, r)
    if exact:
        total_re = Fraction(0)
        total_im = Fraction(0)
        for cls in classes:
            tre, tim = _word_trace_exact(a, b, cls.representative)
            total_re += cls.orbit_size * tre
            total_im += cls.orbit_size * tim
        assert total_im == 0, "imaginary parts of mirror classes must cancel exactly"
        return total_re
    reps = [cls.representative for cls in classes]
    traces = kernels.word_traces(a.data, b.data, _codes_matrix(reps, p))
    weighted = traces * np.array([cls.orbit_size for cls in classes])
    return float(pairwise_sum(weighted).real)


def min_term(a: HermitianMatrix, b: HermitianMatrix, p: int, r: int) -> tuple[NecklaceClass, float]:
    """The necklace class with the smallest trace monomial, ties broken lexicographically."""
    _check_pr(p, r)
    same_dim(a, b)
    if p < 1 or p > NECKLACE_MAX_P:
        raise DomainError(f"min_term needs 1 <= p <= {NECKLACE_MAX_P}, got {p}")
    classes = necklaces(p, r)
    reps = [cls.representative for cls in classes]
    traces = kernels.word_traces(a.data, b.data, _codes_matrix(reps, p)).real
    best = min(range(len(classes)), key=lambda i: (traces[i], classes[i].representative.letters))
    return classes[best], float(traces[best])


def word_count(p: int, r: int) -> int:
    return math.comb(p, r)


def term_report_rows(
    a: HermitianMatrix, b: HermitianMatrix, p: int, r: int, exact: bool = False
) -> list[dict]:
    """Term-level report rows: one necklace class per row.

    Columns: p, r, representative, orbit_size, value, exact_num, exact_den
    (the exact columns are empty strings unless exact mode is on).
    """
    _check_pr(p, r)
    same_dim(a, b)
    classes = necklaces(p, r)
    reps = [cls.representative for cls in classes]
    traces = kernels.word_traces(a.data, b.data, _codes_matrix(reps, p)).real
    rows = []
    for cls, value in zip(classes, traces):
        row = {
            "p": p,
            "r": r,
            "representative": cls.representative.letters,
            "orbit_size": cls.orbit_size,
            "value": float(value),
            "exact_num": "",
            "exact_den": "",
        }
        if exact:
            tre = _word_trace_exact(a, b, cls.representative)[0]
            row["exact_num"] = str(tre.numerator)
            row["exact_den"] = str(tre.denominator)
        rows.append(row)
    return rows
