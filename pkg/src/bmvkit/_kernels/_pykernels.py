"""Pure numpy implementations of the hot kernels.

Import-time fallback when the compiled extension is unavailable (or when
``BMV_PURE_PYTHON`` is set). Semantics match ``_cykernels``; floating-point
results may differ from the compiled backend in the last bits only.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

_CHUNK = 4096


def _as_c(a: np.ndarray) -> np.ndarray:
    return np.array(a, dtype=np.complex128, order="C", copy=True)


def poly_traces(a, b, p: int, r_max: int) -> np.ndarray:
    """Traces of the degree-j coefficient matrices of (A + x B)^p, j = 0..r_max.

    Recurrence over coefficient matrices: T_k[j] = A T_{k-1}[j] + B T_{k-1}[j-1].
    """
    a = _as_c(a)
    b = _as_c(b)
    n = a.shape[0]
    t = np.zeros((r_max + 1, n, n), dtype=np.complex128)
    t[0] = np.eye(n)
    for k in range(1, p + 1):
        jmax = min(k, r_max)
        for j in range(jmax, 0, -1):
            t[j] = a @ t[j] + b @ t[j - 1]
        t[0] = a @ t[0]
    return np.trace(t, axis1=1, axis2=2)


def poly_coeff_adjoint(a, b, p: int, r: int) -> tuple[np.ndarray, np.ndarray]:
    """Reverse-mode accumulation of d Re Tr T_p[r] through the recurrence.

    Returns raw (unsymmetrized) gradients with respect to free complex A and B,
    in the pairing dc = Re Tr(gA dA) + Re Tr(gB dB).
    """
    a = _as_c(a)
    b = _as_c(b)
    n = a.shape[0]
    fwd = np.zeros((p, r + 1, n, n), dtype=np.complex128)  # fwd[k] = T_k, k = 0..p-1
    t = np.zeros((r + 1, n, n), dtype=np.complex128)
    t[0] = np.eye(n)
    for k in range(p):
        fwd[k] = t
        jmax = min(k + 1, r)
        for j in range(jmax, 0, -1):
            t[j] = a @ t[j] + b @ t[j - 1]
        t[0] = a @ t[0]
    tbar = np.zeros((r + 1, n, n), dtype=np.complex128)
    tbar[r] = np.eye(n)
    ga = np.zeros((n, n), dtype=np.complex128)
    gb = np.zeros((n, n), dtype=np.complex128)
    for k in range(p, 0, -1):
        prev = fwd[k - 1]
        nxt = np.zeros_like(tbar)
        for j in range(min(k, r) + 1):
            tb = tbar[j]
            ga += prev[j] @ tb
            nxt[j] += tb @ a
            if j > 0:
                gb += prev[j - 1] @ tb
                nxt[j - 1] += tb @ b
        tbar = nxt
    return ga, gb


def word_traces(a, b, codes: np.ndarray) -> np.ndarray:
    """Traces of ordered products M_{c1} ... M_{cp} for many words at once.

    ``codes`` is (N, p) uint8 with 0 selecting A and 1 selecting B.
    """
    a = _as_c(a)
    b = _as_c(b)
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    nwords, p = codes.shape
    n = a.shape[0]
    out = np.empty(nwords, dtype=np.complex128)
    if p == 0:
        out[:] = n
        return out
    eye = np.eye(n, dtype=np.complex128)
    for lo in range(0, nwords, _CHUNK):
        hi = min(lo + _CHUNK, nwords)
        cur = np.broadcast_to(eye, (hi - lo, n, n)).copy()
        for k in range(p):
            mask = codes[lo:hi, k] == 0
            if np.any(mask):
                cur[mask] = cur[mask] @ a
            if not np.all(mask):
                cur[~mask] = cur[~mask] @ b
        out[lo:hi] = np.trace(cur, axis1=1, axis2=2)
    return out


def word_adjoint(a, b, code: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw gradients of Re Tr(M_{c1} ... M_{cp}) with respect to A and B."""
    a = _as_c(a)
    b = _as_c(b)
    code = np.asarray(code, dtype=np.uint8)
    p = code.shape[0]
    n = a.shape[0]
    mats = (a, b)
    prefix = np.empty((p + 1, n, n), dtype=np.complex128)
    prefix[0] = np.eye(n)
    for i in range(p):
        prefix[i + 1] = prefix[i] @ mats[code[i]]
    grads = [np.zeros((n, n), dtype=np.complex128), np.zeros((n, n), dtype=np.complex128)]
    suffix = np.eye(n, dtype=np.complex128)
    for i in range(p - 1, -1, -1):
        grads[code[i]] += suffix @ prefix[i]
        suffix = mats[code[i]] @ suffix
    return grads[0], grads[1]
