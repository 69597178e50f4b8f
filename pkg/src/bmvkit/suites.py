"""Cross-checking suites behind the oracle-diff command.

Each suite runs one family of identity checks over seeded random instances
and reports the worst deviation against its tolerance. Instance generation is
fully determined by the seed, so two runs with the same seed produce
identical rows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import equivalence as eq
from .matcore import HermitianMatrix, hermitian, random_hermitian, random_pd, random_psd
from .rng import Stream
from .tracepoly import trace_poly
from .words import coeff_bruteforce, coeff_by_necklaces

CROSS_ENGINE_TOL = 1e-9
DUALITY_TOL = 1e-8
SERIES_TOL = 1e-10
SERIES_K_CAP = 80
QUADRATURE_TOL = 1e-6
QUADRATURE_NODES = 64


@dataclass(frozen=True)
class SuiteRow:
    name: str
    cases: int
    max_dev: float
    tol: float
    passed: bool


def rel_dev(x: float, y: float) -> float:
    if x == y:
        return 0.0
    return abs(x - y) / max(abs(x), abs(y))


def normalized(m: HermitianMatrix, target: float = 1.5) -> HermitianMatrix:
    """Rescale so the operator norm is ``target`` (keeps exp/series well inside guards)."""
    nrm = m.opnorm
    if nrm == 0:
        return m
    return hermitian(m.data * (target / nrm), m.classification)


def suite_cross_engine(seed: int, instances: int, exact_instances: int = 0) -> SuiteRow:
    """All three coefficient engines agree on random instances (and bitwise in exact mode)."""
    root = Stream(seed).child(1)
    worst = 0.0
    cases = 0
    for i in range(instances):
        n = 1 + i % 4
        p = 1 + i % 10
        s = root.child(i)
        a = random_psd(n, n, s.child(0))
        b = random_psd(n, n, s.child(1))
        coeffs = trace_poly(a, b, p).coeffs
        for r in range(p + 1):
            bf = coeff_bruteforce(a, b, p, r)
            nk = coeff_by_necklaces(a, b, p, r)
            worst = max(worst, rel_dev(coeffs[r], bf), rel_dev(bf, nk))
        cases += 1
    for i in range(exact_instances):
        n = 2 + i % 3
        p = 2 + i % 9
        s = root.child(10_000 + i)
        a = random_psd(n, n, s.child(0), exact=True)
        b = random_psd(n, n, s.child(1), exact=True)
        for r in range(p + 1):
            bf = coeff_bruteforce(a, b, p, r, exact=True)
            nk = coeff_by_necklaces(a, b, p, r, exact=True)
            if bf != nk:
                worst = max(worst, 1.0)
        cases += 1
    return SuiteRow("cross-engine", cases, float(worst), CROSS_ENGINE_TOL, bool(worst <= CROSS_ENGINE_TOL))


def suite_duality(seed: int, sum_cap: int, instances_per_pair: int) -> SuiteRow:
    """Two-sided residual of the inverse-power derivative identity."""
    root = Stream(seed).child(2)
    worst = 0.0
    cases = 0
    k = 0
    for p in range(1, sum_cap + 1):
        for r in range(0, sum_cap - p + 1):
            for i in range(instances_per_pair):
                n = 1 + (k % 4)
                s = root.child(k)
                a = random_pd(n, s.child(0))
                b = random_hermitian(n, s.child(1))
                rep = eq.duality_identity_check(a, b, p, r, tol=DUALITY_TOL)
                worst = max(worst, rep.rel_residual)
                cases += 1
                k += 1
    return SuiteRow("duality-identity", cases, float(worst), DUALITY_TOL, bool(worst <= DUALITY_TOL))


def suite_series(seed: int, instances: int) -> SuiteRow:
    """Shifted exponential series reaches the trace of the exponential."""
    root = Stream(seed).child(3)
    worst = 0.0
    cases = 0
    lams = (0.0, 0.5, 2.0)
    for i in range(instances):
        n = 1 + i % 3
        s = root.child(i)
        a = normalized(random_hermitian(n, s.child(0)))
        b = normalized(random_psd(n, n, s.child(1)))
        lam = lams[i % len(lams)]
        rep = eq.series_identity_check(a, b, lam, SERIES_K_CAP)
        gap = rep.abs_error / max(abs(rep.lhs), 1e-300)
        worst = max(worst, gap)
        cases += 1
    return SuiteRow("series-identity", cases, float(worst), SERIES_TOL, bool(worst <= SERIES_TOL))


def suite_quadrature(seed: int, instances: int) -> SuiteRow:
    """Gamma-integral quadrature matches the direct inverse power trace."""
    root = Stream(seed).child(4)
    worst = 0.0
    cases = 0
    powers = (1.0, 2.0, 2.5, 4.0)
    for i in range(instances):
        n = 1 + i % 3
        s = root.child(i)
        a = random_pd(n, s.child(0))
        b = random_psd(n, n, s.child(1))
        lam = (0.0, 0.3, 1.0)[i % 3]
        rep = eq.laplace_rep_check(a, b, lam, powers[i % 4], QUADRATURE_NODES)
        worst = max(worst, rep.rel_error)
        cases += 1
    return SuiteRow("integral-representation", cases, float(worst), QUADRATURE_TOL, bool(worst <= QUADRATURE_TOL))


def run_suite(kind: str, seed: int) -> list[SuiteRow]:
    if kind == "quick":
        return [
            suite_cross_engine(seed, instances=40, exact_instances=4),
            suite_duality(seed, sum_cap=6, instances_per_pair=4),
            suite_series(seed, instances=15),
            suite_quadrature(seed, instances=15),
        ]
    if kind == "full":
        return [
            suite_cross_engine(seed, instances=200, exact_instances=20),
            suite_duality(seed, sum_cap=12, instances_per_pair=50),
            suite_series(seed, instances=50),
            suite_quadrature(seed, instances=50),
        ]
    raise ValueError(f"unknown suite {kind!r}")
