"""Benchmark the compiled kernels against the pure numpy fallback.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from bmvkit._kernels import _pykernels

try:
    from bmvkit._kernels import _cykernels
except ImportError:
    _cykernels = None

from bmvkit.rng import Stream
from bmvkit.words import enumerate_words


def _pair(n: int, seed: int):
    g = Stream(seed).generator()
    a = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
    b = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
    return (a + a.conj().T) / 2, (b + b.conj().T) / 2


def _codes(p: int, r: int) -> np.ndarray:
    return np.array([w.codes() for w in enumerate_words(p, r)], dtype=np.uint8)


def _time(fn, repeats: int) -> float:
    fn()  # warm up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    a4, b4 = _pair(4, 1)
    a3, b3 = _pair(3, 2)
    codes_16_8 = _codes(16, 8)
    word6 = np.array([0, 0, 1, 1, 0, 1], dtype=np.uint8)

    cases = [
        ("poly_traces n=4 p=20", lambda k: k.poly_traces(a4, b4, 20, 20), 50),
        ("poly_coeff_adjoint n=4 p=12 r=6", lambda k: k.poly_coeff_adjoint(a4, b4, 12, 6), 50),
        ("word_traces n=3 (16,8): 12870 words", lambda k: k.word_traces(a3, b3, codes_16_8), 5),
        ("word_adjoint n=3 p=6 x1000", lambda k: [k.word_adjoint(a3, b3, word6) for _ in range(1000)], 5),
    ]

    backends = [("python", _pykernels)]
    if _cykernels is not None:
        backends.append(("cython", _cykernels))

    print(f"{'case':42s}" + "".join(f"{name:>12s}" for name, _ in backends) + f"{'speedup':>10s}")
    for label, fn, repeats in cases:
        times = [_time(lambda k=k: fn(k), repeats) for _, k in backends]
        row = f"{label:42s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)

    if _cykernels is not None:
        # agreement spot check
        pt_py = _pykernels.poly_traces(a4, b4, 12, 12)
        pt_cy = _cykernels.poly_traces(a4, b4, 12, 12)
        dev = float(np.max(np.abs(pt_py - pt_cy)) / np.max(np.abs(pt_py)))
        print(f"\nbackend agreement (poly_traces rel dev): {dev:.3e}")


if __name__ == "__main__":
    main()
