"""Batch command-line interface.

Subcommands wire the library together, read and write matrix files, and emit
machine-readable reports (JSON by default, CSV on request). Every report
embeds a manifest with the full parameter echo, seed, version, and input
digests; replaying a manifest reproduces the report byte-for-byte. Wall-clock
duration goes to stderr only, so report files stay replay-stable.

Exit codes: 0 success or report-only, 2 input error, 3 mathematical check
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from . import equivalence as eq
from .errors import BmvError, CheckFailure
from .matfile import canonical_json, format_float, load_matrix, sha256_file, sha256_text
from .rng import Stream
from .search import (
    OBJECTIVE_COEFF,
    OBJECTIVE_TERM,
    SearchConfig,
    certify_instance,
    save_record,
    search_min_coeff,
    search_negative_term,
)
from .suites import run_suite
from .tracepoly import trace_poly
from .words import coeff_bruteforce, coeff_by_necklaces
from .matcore import random_hermitian, random_pd

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CHECK = 3

ENGINE_DEV_TOL = 1e-9


def _parse_grid(text: str) -> list[float]:
    """Inclusive "start:stop:step" grid; endpoints match within half a step."""
    parts = text.split(":")
    if len(parts) != 3:
        raise BmvError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise BmvError(f"grid {text!r}: {exc}") from exc
    if step <= 0 or stop < start:
        raise BmvError(f"grid {text!r} must have positive step and stop >= start")
    out = []
    k = 0
    while start + k * step <= stop + step / 2:
        out.append(start + k * step)
        k += 1
    return out


def _manifest(subcommand: str, params: dict, seed, input_paths: dict) -> dict:
    return {
        "subcommand": subcommand,
        "parameters": params,
        "seed": seed,
        "version": __version__,
        "input_digests": {name: sha256_file(path) for name, path in input_paths.items()},
    }


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_float(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _render_csv(manifest: dict, fields: list[str], rows: list[dict]) -> str:
    lines = []
    for key in ("subcommand", "seed", "version"):
        lines.append(f"# {key}: {_csv_cell(manifest[key])}")
    lines.append(f"# parameters: {canonical_json(manifest['parameters'])}")
    lines.append(f"# input_digests: {canonical_json(manifest['input_digests'])}")
    lines.append(f"# results_digest: {manifest['results_digest']}")
    lines.append(",".join(fields))
    for row in rows:
        lines.append(",".join(_csv_cell(row.get(f, "")) for f in fields))
    return "\n".join(lines) + "\n"


def _emit(args, manifest: dict, results: dict, fields: list[str], rows: list[dict]) -> None:
    manifest["results_digest"] = sha256_text(canonical_json(results))
    fmt = getattr(args, "format", "json")
    if fmt == "csv":
        text = _render_csv(manifest, fields, rows)
    else:
        text = canonical_json({"manifest": manifest, "results": results}) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_coeffs(args) -> int:
    a = load_matrix(args.a)
    b = load_matrix(args.b)
    p = args.p
    r_max = args.r_max if args.r_max is not None else p
    engines = ["dp", "brute", "necklace"] if args.engine == "all" else [args.engine]
    table: dict[str, list] = {}
    if "dp" in engines:
        table["dp"] = list(trace_poly(a, b, p, r_max).coeffs)
    if "brute" in engines:
        table["brute"] = [coeff_bruteforce(a, b, p, r) for r in range(r_max + 1)]
    if "necklace" in engines:
        table["necklace"] = [coeff_by_necklaces(a, b, p, r) for r in range(r_max + 1)]
    exact_cols = None
    if args.exact:
        exact_cols = [coeff_bruteforce(a, b, p, r, exact=True) for r in range(r_max + 1)]
    max_dev = 0.0
    rows = []
    for r in range(r_max + 1):
        row = {"r": r}
        vals = []
        for name in engines:
            v = float(table[name][r])
            row[name] = v
            vals.append(v)
        for x in vals:
            for y in vals:
                if x != y:
                    max_dev = max(max_dev, abs(x - y) / max(abs(x), abs(y)))
        if exact_cols is not None:
            row["exact_num"] = str(exact_cols[r].numerator)
            row["exact_den"] = str(exact_cols[r].denominator)
        rows.append(row)
    results = {
        "n": a.n,
        "p": p,
        "r_max": r_max,
        "engines": engines,
        "rows": rows,
        "max_cross_engine_dev": max_dev,
    }
    manifest = _manifest(
        "coeffs",
        {
            "a": args.a,
            "b": args.b,
            "p": p,
            "r_max": r_max,
            "engine": args.engine,
            "exact": bool(args.exact),
            "format": args.format,
        },
        None,
        {"a": args.a, "b": args.b},
    )
    fields = ["r"] + engines + (["exact_num", "exact_den"] if exact_cols is not None else [])
    _emit(args, manifest, results, fields, rows)
    if args.engine == "all" and max_dev > ENGINE_DEV_TOL:
        raise CheckFailure(f"engines disagree: relative deviation {max_dev:.3e}")
    return EXIT_OK


def cmd_verify_duality(args) -> int:
    cases = []
    inputs = {}
    if args.random is not None:
        if args.seed is None:
            raise BmvError("--random mode requires --seed")
        root = Stream(args.seed).child(77)
        rng = root.generator()
        for i in range(args.random):
            p = int(rng.integers(1, args.pmax + 1))
            r = int(rng.integers(0, args.rmax + 1))
            s = root.child(i)
            a = random_pd(args.dim, s.child(0))
            b = random_hermitian(args.dim, s.child(1))
            rep = eq.duality_identity_check(a, b, p, r, tol=args.tol)
            cases.append(rep)
    else:
        if not (args.a and args.b and args.p is not None and args.r is not None):
            raise BmvError("need --a/--b/--p/--r or --random mode")
        a = load_matrix(args.a)
        b = load_matrix(args.b)
        inputs = {"a": args.a, "b": args.b}
        cases.append(eq.duality_identity_check(a, b, args.p, args.r, tol=args.tol))
    rows = [
        {
            "case": i,
            "p": rep.p,
            "r": rep.r,
            "lhs": rep.lhs,
            "rhs": rep.rhs,
            "abs_residual": rep.abs_residual,
            "rel_residual": rep.rel_residual,
            "passed": rep.passed,
        }
        for i, rep in enumerate(cases)
    ]
    worst = max((r["rel_residual"] for r in rows), default=0.0)
    all_passed = all(r["passed"] for r in rows)
    results = {"cases": rows, "worst_rel_residual": worst, "all_passed": all_passed, "tol": args.tol}
    manifest = _manifest(
        "verify-duality",
        {
            "a": args.a,
            "b": args.b,
            "p": args.p,
            "r": args.r,
            "tol": args.tol,
            "random": args.random,
            "dim": args.dim,
            "pmax": args.pmax,
            "rmax": args.rmax,
        },
        args.seed,
        inputs,
    )
    fields = ["case", "p", "r", "lhs", "rhs", "abs_residual", "rel_residual", "passed"]
    _emit(args, manifest, results, fields, rows)
    if not all_passed:
        raise CheckFailure(f"duality identity violated: worst relative residual {worst:.3e}")
    return EXIT_OK


def cmd_probe_cm(args) -> int:
    a = load_matrix(args.a)
    b = load_matrix(args.b)
    grid = _parse_grid(args.grid)
    if args.mode == "exp":
        report = eq.cm_probe_exp(a, b, args.rmax, grid, tol=args.tol)
    elif args.mode == "invpow":
        p = int(args.p if args.p is not None else 1)
        report = eq.cm_probe_invpow(a, b, p, args.rmax, grid, tol=args.tol)
    else:
        if not args.mixture:
            raise BmvError("mixture mode requires --mixture FILE")
        with open(args.mixture) as fh:
            try:
                mix_doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise BmvError(f"{args.mixture}: invalid JSON: {exc}") from exc
        terms = [(float(w), float(t)) for w, t in mix_doc["terms"]]
        report = eq.cm_probe_general_f(a, b, terms, grid, args.rmax, tol=args.tol)
    rows = []
    for i, lam in enumerate(report.lambda_grid):
        row = {"lambda": float(lam)}
        for r in report.orders:
            row[f"order_{r}"] = float(report.values[i, r])
        rows.append(row)
    results = {
        "mode": report.mode,
        "r_max": int(report.orders[-1]),
        "lambda_grid": [float(x) for x in report.lambda_grid],
        "values": [[float(v) for v in row] for row in report.values],
        "scales": [float(s) for s in report.scales],
        "min_signed_value": report.min_signed_value,
        "violations": [[lam, r, v] for lam, r, v in report.violations],
        "tol": report.tol,
        "crosscheck_dev": report.crosscheck_dev,
    }
    manifest = _manifest(
        "probe-cm",
        {
            "mode": args.mode,
            "a": args.a,
            "b": args.b,
            "p": args.p,
            "rmax": args.rmax,
            "grid": args.grid,
            "mixture": args.mixture,
            "tol": args.tol,
        },
        None,
        {"a": args.a, "b": args.b},
    )
    fields = ["lambda"] + [f"order_{r}" for r in report.orders]
    _emit(args, manifest, results, fields, rows)
    if a.n == 2 and b.n == 2 and report.violations:
        # the 2x2 case is proved; a violation there is a bug, not a finding
        raise CheckFailure(f"complete monotonicity violated on 2x2 input: {report.violations[:3]}")
    return EXIT_OK


def cmd_search(args) -> int:
    objective = OBJECTIVE_COEFF if args.objective == "coeff" else OBJECTIVE_TERM
    cfg = SearchConfig(
        n=args.n,
        p=args.p,
        r=args.r,
        objective=objective,
        word=args.word,
        restarts=args.restarts,
        max_iters=args.iters,
        seed=args.seed,
    )
    cfg.validate()
    if objective == OBJECTIVE_COEFF:
        record = search_min_coeff(cfg)
        if args.certify:
            record = certify_instance(record)
    else:
        record = search_negative_term(cfg)
        if args.certify and record.certification.get("status") == "none":
            record = certify_instance(record)
    files = {}
    if args.out_prefix:
        files = save_record(record, args.out_prefix)
    rows = [
        {
            "restart": s.index,
            "value": s.value,
            "iterations": s.iterations,
            "accepted_steps": s.accepted_steps,
        }
        for s in record.restart_log
    ]
    results = {
        "objective": objective,
        "word": args.word,
        "n": args.n,
        "p": args.p,
        "r": args.r,
        "best_value": record.best_value,
        "best_restart": record.best_restart,
        "coefficient_at_best": record.coefficient_at_best,
        "certification": record.certification,
        "negative_restarts": sum(1 for s in record.restart_log if s.value < 0),
        "instance_files": files,
        "restart_log": rows,
    }
    manifest = _manifest(
        "search",
        {
            "objective": args.objective,
            "word": args.word,
            "n": args.n,
            "p": args.p,
            "r": args.r,
            "restarts": args.restarts,
            "iters": args.iters,
            "certify": bool(args.certify),
            "out_prefix": args.out_prefix,
        },
        args.seed,
        {},
    )
    fields = ["restart", "value", "iterations", "accepted_steps"]
    _emit(args, manifest, results, fields, rows)
    status = record.certification.get("status")
    summary = (
        f"best {format_float(record.best_value)} (restart {record.best_restart}), "
        f"certification: {status}"
    )
    print(summary, file=sys.stderr)
    return EXIT_OK


def cmd_oracle_diff(args) -> int:
    rows_obj = run_suite(args.suite, args.seed)
    rows = [
        {
            "name": r.name,
            "cases": r.cases,
            "max_dev": r.max_dev,
            "tol": r.tol,
            "passed": r.passed,
        }
        for r in rows_obj
    ]
    all_passed = all(r["passed"] for r in rows)
    results = {"suite": args.suite, "rows": rows, "all_passed": all_passed}
    manifest = _manifest(
        "oracle-diff", {"suite": args.suite}, args.seed, {}
    )
    _emit(args, manifest, results, ["name", "cases", "max_dev", "tol", "passed"], rows)
    if not all_passed:
        failed = [r["name"] for r in rows if not r["passed"]]
        raise CheckFailure(f"suites failed: {', '.join(failed)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bmv",
        description="Trace-positivity verification and counterexample search toolkit",
    )
    parser.add_argument("--version", action="version", version=f"bmv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("coeffs", help="coefficients of Tr (A + x B)^p by one or all engines")
    c.add_argument("--a", required=True, help="matrix file for A")
    c.add_argument("--b", required=True, help="matrix file for B")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--r-max", dest="r_max", type=int, default=None)
    c.add_argument("--engine", choices=["dp", "brute", "necklace", "all"], default="all")
    c.add_argument("--exact", action="store_true", help="add exact rational columns")
    c.add_argument("--out", default=None)
    c.add_argument("--format", choices=["json", "csv"], default="json")
    c.set_defaults(func=cmd_coeffs)

    v = sub.add_parser("verify-duality", help="two-sided check of the derivative identity")
    v.add_argument("--a")
    v.add_argument("--b")
    v.add_argument("--p", type=int)
    v.add_argument("--r", type=int)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--random", type=int, default=None, help="number of random cases")
    v.add_argument("--dim", type=int, default=3)
    v.add_argument("--seed", type=int, default=None)
    v.add_argument("--pmax", type=int, default=3)
    v.add_argument("--rmax", type=int, default=3)
    v.add_argument("--out", default=None)
    v.add_argument("--format", choices=["json", "csv"], default="json")
    v.set_defaults(func=cmd_verify_duality)

    pc = sub.add_parser("probe-cm", help="complete-monotonicity probe")
    pc.add_argument("--mode", choices=["exp", "invpow", "mixture"], required=True)
    pc.add_argument("--a", required=True)
    pc.add_argument("--b", required=True)
    pc.add_argument("--p", type=float, default=None)
    pc.add_argument("--rmax", type=int, default=4)
    pc.add_argument("--grid", default="0:5:0.25")
    pc.add_argument("--mixture", default=None, help="JSON file with {\"terms\": [[w, t], ...]}")
    pc.add_argument("--tol", type=float, default=1e-10)
    pc.add_argument("--out", default=None)
    pc.add_argument("--format", choices=["json", "csv"], default="json")
    pc.set_defaults(func=cmd_probe_cm)

    se = sub.add_parser("search", help="minimize a coefficient or a single trace monomial")
    se.add_argument("--objective", choices=["coeff", "term"], required=True)
    se.add_argument("--word", default=None, help="word for the term objective, e.g. AABBAB")
    se.add_argument("--n", type=int, required=True)
    se.add_argument("--p", type=int, default=6)
    se.add_argument("--r", type=int, default=3)
    se.add_argument("--restarts", type=int, default=100)
    se.add_argument("--iters", type=int, default=200)
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--certify", action="store_true")
    se.add_argument("--out-prefix", dest="out_prefix", default=None)
    se.add_argument("--out", default=None)
    se.add_argument("--format", choices=["json", "csv"], default="json")
    se.set_defaults(func=cmd_search)

    od = sub.add_parser("oracle-diff", help="run the cross-checking suites")
    od.add_argument("--suite", choices=["quick", "full"], default="quick")
    od.add_argument("--seed", type=int, default=0)
    od.add_argument("--out", default=None)
    od.add_argument("--format", choices=["json", "csv"], default="json")
    od.set_defaults(func=cmd_oracle_diff)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.monotonic()
    try:
        code = args.func(args)
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (BmvError, FileNotFoundError, KeyError, TypeError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        elapsed = time.monotonic() - start
        print(f"[bmv] {elapsed:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
