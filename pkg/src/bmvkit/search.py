"""Gradient-descent hunting for negative coefficients and trace monomials.

Both matrices are parametrized as Gram products A = G G*, B = H H*, so every
iterate is positive semidefinite by construction. Projected gradient descent
with Armijo backtracking minimizes either a single coefficient of
Tr (A + x B)^p or one trace monomial; any negative value found is re-evaluated
in exact rational arithmetic on dyadically rounded factors.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import _kernels as kernels
from .errors import DomainError
from .exact import ExactMatrix, dyadic_matrix
from .matcore import POSITIVE, HermitianMatrix, hermitian
from .rng import Stream
from .words import BinaryWord, coeff_bruteforce, word_trace

OBJECTIVE_COEFF = "coefficient"
OBJECTIVE_TERM = "single-term"

TRACE_ONE = "trace-one"
OPNORM_ONE = "operator-norm-one"

# dyadic precisions tried during certification; entry denominators stay <= 2^64
_CERT_BITS = (16, 24, 32)
_DENOMINATOR_BUDGET = 2**64

_CHUNK = 10  # restart batch; the last index of each chunk perturbs the best so far


@dataclass(frozen=True)
class SearchConfig:
    n: int
    p: int
    r: int
    objective: str = OBJECTIVE_COEFF
    word: str | None = None
    restarts: int = 100
    max_iters: int = 200
    seed: int = 0
    normalization: str = TRACE_ONE
    step_init: float = 1.0
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 40
    real_factors: bool | None = None

    def resolved_word(self) -> BinaryWord | None:
        if self.objective != OBJECTIVE_TERM:
            return None
        w = BinaryWord(self.word if self.word is not None else "AABBAB")
        if w.length != self.p or w.weight != self.r:
            raise DomainError(
                f"word {w} has length {w.length}, weight {w.weight}; expected p={self.p}, r={self.r}"
            )
        return w

    def use_real_factors(self) -> bool:
        # a single monomial trace of a complex pair can be complex; keep the
        # certified value genuinely real by searching real factors for terms
        if self.real_factors is not None:
            return self.real_factors
        return self.objective == OBJECTIVE_TERM

    def validate(self) -> None:
        if self.n < 1:
            raise DomainError(f"dimension must be at least 1, got {self.n}")
        if not 0 <= self.r <= self.p:
            raise DomainError(f"need 0 <= r <= p, got p={self.p}, r={self.r}")
        if self.p < 1:
            raise DomainError("exponent must be at least 1")
        if self.restarts < 1:
            raise DomainError("need at least one restart")
        if self.objective not in (OBJECTIVE_COEFF, OBJECTIVE_TERM):
            raise DomainError(f"unknown objective {self.objective!r}")
        if self.normalization not in (TRACE_ONE, OPNORM_ONE):
            raise DomainError(f"unknown normalization {self.normalization!r}")
        self.resolved_word()


@dataclass(frozen=True)
class RestartSummary:
    index: int
    value: float
    iterations: int
    accepted_steps: int


@dataclass(frozen=True)
class SearchRecord:
    config: SearchConfig
    best_value: float
    a: HermitianMatrix
    b: HermitianMatrix
    factor_a: np.ndarray
    factor_b: np.ndarray
    best_restart: int
    restart_log: tuple[RestartSummary, ...]
    coefficient_at_best: float
    certification: dict = field(default_factory=lambda: {"status": "none"})

    @property
    def certified_negative(self) -> bool:
        return self.certification.get("status") == "rational-certified" and (
            int(self.certification["value_num"]) < 0
        )


def _normalize(g: np.ndarray, normalization: str) -> np.ndarray:
    if normalization == TRACE_ONE:
        nrm = np.linalg.norm(g)
    else:
        nrm = float(np.linalg.svd(g, compute_uv=False)[0])
    if nrm == 0:
        raise DomainError("zero factor cannot be normalized")
    return g / nrm


def _gram(g: np.ndarray) -> np.ndarray:
    return g @ g.conj().T


def _value(cfg: SearchConfig, codes, g: np.ndarray, h: np.ndarray) -> float:
    a = _gram(g)
    b = _gram(h)
    if cfg.objective == OBJECTIVE_COEFF:
        return float(kernels.poly_traces(a, b, cfg.p, cfg.r)[cfg.r].real)
    return float(kernels.word_traces(a, b, codes[None, :])[0].real)


def _value_grad(cfg: SearchConfig, codes, g, h) -> tuple[float, np.ndarray, np.ndarray]:
    a = _gram(g)
    b = _gram(h)
    if cfg.objective == OBJECTIVE_COEFF:
        val = float(kernels.poly_traces(a, b, cfg.p, cfg.r)[cfg.r].real)
        raw_a, raw_b = kernels.poly_coeff_adjoint(a, b, cfg.p, cfg.r)
    else:
        val = float(kernels.word_traces(a, b, codes[None, :])[0].real)
        raw_a, raw_b = kernels.word_adjoint(a, b, codes)
    ga = (raw_a + raw_a.conj().T) / 2
    gb = (raw_b + raw_b.conj().T) / 2
    gg = 2.0 * (ga @ g)
    gh = 2.0 * (gb @ h)
    if cfg.use_real_factors():
        gg = gg.real
        gh = gh.real
    return val, gg, gh


def _run_restart(cfg: SearchConfig, codes, g0, h0, trace_values: list | None = None):
    """Armijo projected descent from one start; returns (value, G, H, iters, accepted).

    The line search moves along the normalized gradient direction and starts
    each iteration at twice the previously accepted step (capped at
    ``step_init``), so progress does not stall where the gradient is tiny.
    """
    g = _normalize(g0, cfg.normalization)
    h = _normalize(h0, cfg.normalization)
    val, gg, gh = _value_grad(cfg, codes, g, h)
    if trace_values is not None:
        trace_values.append(val)
    accepted = 0
    it = 0
    last_step = cfg.step_init
    for it in range(1, cfg.max_iters + 1):
        gnorm = math.sqrt(float(np.vdot(gg, gg).real + np.vdot(gh, gh).real))
        if gnorm <= 1e-15 * max(1.0, abs(val)):
            break
        dg = gg / gnorm
        dh = gh / gnorm
        step = min(2.0 * last_step, cfg.step_init)
        moved = False
        for _ in range(cfg.max_backtracks):
            g_try = _normalize(g - step * dg, cfg.normalization)
            h_try = _normalize(h - step * dh, cfg.normalization)
            v_try = _value(cfg, codes, g_try, h_try)
            if v_try <= val - cfg.armijo_c * step * gnorm:
                moved = True
                break
            step *= cfg.backtrack
        if not moved:
            break
        g, h, val = g_try, h_try, v_try
        last_step = step
        accepted += 1
        if trace_values is not None:
            trace_values.append(val)
        val, gg, gh = _value_grad(cfg, codes, g, h)
    return val, g, h, it, accepted


def _start_point(cfg: SearchConfig, idx: int, best: tuple | None):
    stream = Stream(cfg.seed).child(idx)
    rng = stream.generator()
    n = cfg.n
    if best is not None and idx % _CHUNK == _CHUNK - 1:
        _, bg, bh = best
        if cfg.use_real_factors():
            return (
                bg + 0.05 * rng.standard_normal((n, n)),
                bh + 0.05 * rng.standard_normal((n, n)),
            )
        return (
            bg + 0.05 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))),
            bh + 0.05 * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))),
        )
    if cfg.use_real_factors():
        return rng.standard_normal((n, n)), rng.standard_normal((n, n))
    return (
        (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0),
        (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0),
    )


def _thread_count() -> int:
    env = os.environ.get("BMV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(os.cpu_count() or 1, 8)


def _search(cfg: SearchConfig) -> SearchRecord:
    cfg.validate()
    word = cfg.resolved_word()
    codes = word.codes() if word is not None else None
    log: list[RestartSummary] = []
    best: tuple | None = None  # (value, G, H)
    best_idx = -1
    threads = _thread_count()

    def run_one(idx: int, snapshot):
        g0, h0 = _start_point(cfg, idx, snapshot)
        return _run_restart(cfg, codes, g0, h0)

    for chunk_lo in range(0, cfg.restarts, _CHUNK):
        chunk = range(chunk_lo, min(chunk_lo + _CHUNK, cfg.restarts))
        snapshot = best  # chunk members only see results of earlier chunks
        if threads > 1 and len(chunk) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(lambda i: run_one(i, snapshot), chunk))
        else:
            results = [run_one(i, snapshot) for i in chunk]
        for idx, (val, g, h, iters, accepted) in zip(chunk, results):
            log.append(RestartSummary(idx, val, iters, accepted))
            if best is None or val < best[0]:
                best = (val, g, h)
                best_idx = idx
    val, g, h = best
    a_mat = _gram(g)
    b_mat = _gram(h)
    a = hermitian(a_mat, POSITIVE)
    b = hermitian(b_mat, POSITIVE)
    coeff = float(kernels.poly_traces(a.data, b.data, cfg.p, cfg.r)[cfg.r].real)
    return SearchRecord(
        config=cfg,
        best_value=val,
        a=a,
        b=b,
        factor_a=g,
        factor_b=h,
        best_restart=best_idx,
        restart_log=tuple(log),
        coefficient_at_best=coeff,
    )


def search_min_coeff(cfg: SearchConfig) -> SearchRecord:
    """Minimize the coefficient of x^r in Tr (A + x B)^p over PSD pairs."""
    if cfg.objective != OBJECTIVE_COEFF:
        raise DomainError("search_min_coeff requires the coefficient objective")
    return _search(cfg)


def search_negative_term(cfg: SearchConfig) -> SearchRecord:
    """Minimize a single trace monomial and certify a negative value exactly."""
    if cfg.objective != OBJECTIVE_TERM:
        raise DomainError("search_negative_term requires the single-term objective")
    record = _search(cfg)
    if record.best_value < 0:
        record = certify_instance(record)
    return record


def _exact_objective(cfg: SearchConfig, ea: ExactMatrix, eb: ExactMatrix) -> Fraction:
    a = hermitian(ea.to_complex(), POSITIVE, exact=ea)
    b = hermitian(eb.to_complex(), POSITIVE, exact=eb)
    word = cfg.resolved_word()
    if word is not None:
        return word_trace(a, b, word, exact=True)
    return coeff_bruteforce(a, b, cfg.p, cfg.r, exact=True)


def save_record(record: SearchRecord, prefix: str) -> dict[str, str]:
    """Write the instance matrices and a metadata document under ``prefix``.

    The metadata carries the config echo, factors, restart log, and
    certification; ``load_record`` rebuilds a record that ``certify_instance``
    can re-ingest.
    """
    from .matfile import canonical_json, save_matrix  # local import to avoid a cycle

    paths = {
        "a": f"{prefix}_A.json",
        "b": f"{prefix}_B.json",
        "record": f"{prefix}_record.json",
    }
    save_matrix(record.a, paths["a"])
    save_matrix(record.b, paths["b"])
    cfg = record.config
    doc = {
        "config": {
            "n": cfg.n,
            "p": cfg.p,
            "r": cfg.r,
            "objective": cfg.objective,
            "word": cfg.word,
            "restarts": cfg.restarts,
            "max_iters": cfg.max_iters,
            "seed": cfg.seed,
            "normalization": cfg.normalization,
        },
        "best_value": record.best_value,
        "best_restart": record.best_restart,
        "coefficient_at_best": record.coefficient_at_best,
        "factor_a_re": record.factor_a.real.tolist(),
        "factor_a_im": record.factor_a.imag.tolist() if np.iscomplexobj(record.factor_a) else None,
        "factor_b_re": record.factor_b.real.tolist(),
        "factor_b_im": record.factor_b.imag.tolist() if np.iscomplexobj(record.factor_b) else None,
        "restart_log": [
            {"index": s.index, "value": s.value, "iterations": s.iterations, "accepted": s.accepted_steps}
            for s in record.restart_log
        ],
        "certification": record.certification,
        "matrix_files": {"a": paths["a"], "b": paths["b"]},
    }
    with open(paths["record"], "w") as fh:
        fh.write(canonical_json(doc) + "\n")
    return paths


def load_record(path: str) -> SearchRecord:
    """Rebuild a SearchRecord from a metadata document written by save_record."""
    import json

    from .matfile import load_matrix

    with open(path) as fh:
        doc = json.load(fh)
    c = doc["config"]
    cfg = SearchConfig(
        n=c["n"],
        p=c["p"],
        r=c["r"],
        objective=c["objective"],
        word=c["word"],
        restarts=c["restarts"],
        max_iters=c["max_iters"],
        seed=c["seed"],
        normalization=c["normalization"],
    )
    def _factor(re_key, im_key):
        re = np.asarray(doc[re_key], dtype=float)
        if doc[im_key] is None:
            return re
        return re + 1j * np.asarray(doc[im_key], dtype=float)

    return SearchRecord(
        config=cfg,
        best_value=float(doc["best_value"]),
        a=load_matrix(doc["matrix_files"]["a"]),
        b=load_matrix(doc["matrix_files"]["b"]),
        factor_a=_factor("factor_a_re", "factor_a_im"),
        factor_b=_factor("factor_b_re", "factor_b_im"),
        best_restart=int(doc["best_restart"]),
        restart_log=tuple(
            RestartSummary(s["index"], s["value"], s["iterations"], s["accepted"])
            for s in doc["restart_log"]
        ),
        coefficient_at_best=float(doc["coefficient_at_best"]),
        certification=doc["certification"],
    )


def certify_instance(record: SearchRecord) -> SearchRecord:
    """Re-evaluate the objective exactly on dyadically rounded factors.

    Updates the certification (and attaches exact matrices) without touching
    the floating best_value. Negative exact values certify; non-negative ones
    record status "none".
    """
    cfg = record.config
    outcome: dict = {"status": "none"}
    new_a, new_b = record.a, record.b
    for bits in _CERT_BITS:
        gq = dyadic_matrix(np.atleast_2d(record.factor_a), bits)
        hq = dyadic_matrix(np.atleast_2d(record.factor_b), bits)
        ea = ExactMatrix.from_gram(gq)
        eb = ExactMatrix.from_gram(hq)
        if max(ea.max_denominator(), eb.max_denominator()) > _DENOMINATOR_BUDGET:
            outcome = {"status": "precision-exceeded", "bits": bits}
            break
        value = _exact_objective(cfg, ea, eb)
        outcome = {
            "status": "rational-certified" if value < 0 else "none",
            "value_num": str(value.numerator),
            "value_den": str(value.denominator),
            "bits": bits,
        }
        if value < 0:
            new_a = hermitian(ea.to_complex(), POSITIVE, exact=ea)
            new_b = hermitian(eb.to_complex(), POSITIVE, exact=eb)
            break
    return replace(record, certification=outcome, a=new_a, b=new_b)
