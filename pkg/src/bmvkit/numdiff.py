"""Richardson-extrapolated central finite differences.

Independent derivative oracle used to cross-check the composition-sum and
block-augmentation derivative engines. Deliberately simple: symmetric stencil
of order ``order`` (error series in h^2), halved steps, Ridders-style
selection of the best-converged tableau entry.
"""

from __future__ import annotations

import math

import numpy as np


def central_difference(f, x0: float, order: int, h: float) -> float:
    """Symmetric stencil estimate of f^(order)(x0) with truncation O(h^2)."""
    if order == 0:
        return f(x0)
    acc = 0.0
    for j in range(order + 1):
        acc += (-1) ** j * math.comb(order, j) * f(x0 + (order / 2 - j) * h)
    return acc / h**order


def derivative(f, x0: float, order: int, h0: float, levels: int = 6) -> tuple[float, float]:
    """(estimate, error guess) for f^(order)(x0).

    Builds a Richardson tableau over steps h0 / 2^i and returns the entry with
    the smallest discrepancy against its neighbours, stopping early once the
    error estimate deteriorates persistently (roundoff regime).
    """
    if order == 0:
        return f(x0), 0.0
    rows: list[list[float]] = []
    best = math.nan
    best_err = math.inf
    worsened = 0
    for i in range(levels):
        h = h0 / 2.0**i
        row = [central_difference(f, x0, order, h)]
        for j in range(1, i + 1):
            fac = 4.0**j
            row.append((fac * row[j - 1] - rows[i - 1][j - 1]) / (fac - 1.0))
        rows.append(row)
        if i == 0:
            continue
        err = abs(row[i] - row[i - 1])
        err = max(err, abs(row[i] - rows[i - 1][i - 1]))
        if err < best_err:
            best_err = err
            best = row[i]
            worsened = 0
        else:
            worsened += 1
            if worsened >= 2:
                break
    if math.isnan(best):
        best = rows[-1][-1]
        best_err = math.inf
    return best, best_err


def directional_step(scale: float, order: int) -> float:
    """Reasonable initial step for a function with curvature scale ~ 1/scale."""
    return 0.05 * max(scale, 1e-6)


def hermitian_directions(n: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Random unit-Frobenius-norm Hermitian directions."""
    out = []
    for _ in range(count):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (g + g.conj().T) / 2
        out.append(h / np.linalg.norm(h))
    return out
