# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Same contracts as ``_pykernels``."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef double complex dc


cdef inline void _matmul(dc* out, const dc* x, const dc* y, int n) noexcept nogil:
    cdef int i, j, k
    cdef dc s
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s = s + x[i * n + k] * y[k * n + j]
            out[i * n + j] = s


cdef inline void _add(dc* out, const dc* x, const dc* y, int nn) noexcept nogil:
    cdef int i
    for i in range(nn):
        out[i] = x[i] + y[i]


cdef inline void _acc_matmul(dc* acc, const dc* x, const dc* y, int n) noexcept nogil:
    # acc += x @ y
    cdef int i, j, k
    cdef dc s
    for i in range(n):
        for j in range(n):
            s = 0
            for k in range(n):
                s = s + x[i * n + k] * y[k * n + j]
            acc[i * n + j] = acc[i * n + j] + s


cdef inline dc _trace(const dc* x, int n) noexcept nogil:
    cdef int i
    cdef dc s = 0
    for i in range(n):
        s = s + x[i * n + i]
    return s


def poly_traces(a, b, int p, int r_max):
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    b = np.array(b, dtype=np.complex128, order="C", copy=True)
    cdef dc[:, ::1] av = a
    cdef dc[:, ::1] bv = b
    cdef int n = av.shape[0]
    t_arr = np.zeros((r_max + 1, n, n), dtype=np.complex128)
    s1_arr = np.empty((n, n), dtype=np.complex128)
    s2_arr = np.empty((n, n), dtype=np.complex128)
    cdef dc[:, :, ::1] t = t_arr
    cdef dc[:, ::1] s1 = s1_arr
    cdef dc[:, ::1] s2 = s2_arr
    cdef int i, k, j, jmax
    for i in range(n):
        t[0, i, i] = 1
    for k in range(1, p + 1):
        jmax = min(k, r_max)
        for j in range(jmax, 0, -1):
            _matmul(&s1[0, 0], &av[0, 0], &t[j, 0, 0], n)
            _matmul(&s2[0, 0], &bv[0, 0], &t[j - 1, 0, 0], n)
            _add(&t[j, 0, 0], &s1[0, 0], &s2[0, 0], n * n)
        _matmul(&s1[0, 0], &av[0, 0], &t[0, 0, 0], n)
        t_arr[0] = s1_arr
    out = np.empty(r_max + 1, dtype=np.complex128)
    cdef dc[::1] ov = out
    for j in range(r_max + 1):
        ov[j] = _trace(&t[j, 0, 0], n)
    return out


def poly_coeff_adjoint(a, b, int p, int r):
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    b = np.array(b, dtype=np.complex128, order="C", copy=True)
    cdef dc[:, ::1] av = a
    cdef dc[:, ::1] bv = b
    cdef int n = av.shape[0]
    fwd_arr = np.zeros((p, r + 1, n, n), dtype=np.complex128)
    t_arr = np.zeros((r + 1, n, n), dtype=np.complex128)
    s1_arr = np.empty((n, n), dtype=np.complex128)
    s2_arr = np.empty((n, n), dtype=np.complex128)
    tbar_arr = np.zeros((r + 1, n, n), dtype=np.complex128)
    nxt_arr = np.zeros((r + 1, n, n), dtype=np.complex128)
    ga_arr = np.zeros((n, n), dtype=np.complex128)
    gb_arr = np.zeros((n, n), dtype=np.complex128)
    cdef dc[:, :, :, ::1] fwd = fwd_arr
    cdef dc[:, :, ::1] t = t_arr
    cdef dc[:, ::1] s1 = s1_arr
    cdef dc[:, ::1] s2 = s2_arr
    cdef dc[:, :, ::1] tbar = tbar_arr
    cdef dc[:, :, ::1] nxt = nxt_arr
    cdef dc[:, ::1] ga = ga_arr
    cdef dc[:, ::1] gb = gb_arr
    cdef int i, k, j, jmax
    for i in range(n):
        t[0, i, i] = 1
    for k in range(p):
        fwd_arr[k] = t_arr
        jmax = min(k + 1, r)
        for j in range(jmax, 0, -1):
            _matmul(&s1[0, 0], &av[0, 0], &t[j, 0, 0], n)
            _matmul(&s2[0, 0], &bv[0, 0], &t[j - 1, 0, 0], n)
            _add(&t[j, 0, 0], &s1[0, 0], &s2[0, 0], n * n)
        _matmul(&s1[0, 0], &av[0, 0], &t[0, 0, 0], n)
        t_arr[0] = s1_arr
    for i in range(n):
        tbar[r, i, i] = 1
    for k in range(p, 0, -1):
        nxt_arr[:] = 0
        jmax = min(k, r)
        for j in range(jmax + 1):
            _acc_matmul(&ga[0, 0], &fwd[k - 1, j, 0, 0], &tbar[j, 0, 0], n)
            _acc_matmul(&nxt[j, 0, 0], &tbar[j, 0, 0], &av[0, 0], n)
            if j > 0:
                _acc_matmul(&gb[0, 0], &fwd[k - 1, j - 1, 0, 0], &tbar[j, 0, 0], n)
                _acc_matmul(&nxt[j - 1, 0, 0], &tbar[j, 0, 0], &bv[0, 0], n)
        tbar_arr, nxt_arr = nxt_arr, tbar_arr
        tbar = tbar_arr
        nxt = nxt_arr
    return ga_arr, gb_arr


def word_traces(a, b, codes):
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    b = np.array(b, dtype=np.complex128, order="C", copy=True)
    codes = np.ascontiguousarray(codes, dtype=np.uint8)
    cdef dc[:, ::1] av = a
    cdef dc[:, ::1] bv = b
    cdef const unsigned char[:, ::1] cv = codes
    cdef int n = av.shape[0]
    cdef Py_ssize_t nwords = cv.shape[0]
    cdef int p = cv.shape[1]
    out = np.empty(nwords, dtype=np.complex128)
    cdef dc[::1] ov = out
    cur_arr = np.empty((n, n), dtype=np.complex128)
    nxt_arr = np.empty((n, n), dtype=np.complex128)
    cdef dc[:, ::1] cur = cur_arr
    cdef dc[:, ::1] nxt = nxt_arr
    cdef dc* curp
    cdef dc* nxtp
    cdef dc* tmp
    cdef const dc* m
    cdef Py_ssize_t w
    cdef int k, i, j
    if p == 0:
        out[:] = n
        return out
    with nogil:
        for w in range(nwords):
            curp = &cur[0, 0]
            nxtp = &nxt[0, 0]
            m = &av[0, 0] if cv[w, 0] == 0 else &bv[0, 0]
            for i in range(n):
                for j in range(n):
                    curp[i * n + j] = m[i * n + j]
            for k in range(1, p):
                m = &av[0, 0] if cv[w, k] == 0 else &bv[0, 0]
                _matmul(nxtp, curp, m, n)
                tmp = curp
                curp = nxtp
                nxtp = tmp
            ov[w] = _trace(curp, n)
    return out


def word_adjoint(a, b, code):
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    b = np.array(b, dtype=np.complex128, order="C", copy=True)
    code = np.ascontiguousarray(code, dtype=np.uint8)
    cdef dc[:, ::1] av = a
    cdef dc[:, ::1] bv = b
    cdef const unsigned char[::1] cv = code
    cdef int n = av.shape[0]
    cdef int p = cv.shape[0]
    prefix_arr = np.empty((p + 1, n, n), dtype=np.complex128)
    prefix_arr[0] = np.eye(n)
    suf_arr = np.eye(n, dtype=np.complex128)
    tmp_arr = np.empty((n, n), dtype=np.complex128)
    ga_arr = np.zeros((n, n), dtype=np.complex128)
    gb_arr = np.zeros((n, n), dtype=np.complex128)
    cdef dc[:, :, ::1] prefix = prefix_arr
    cdef dc[:, ::1] suf = suf_arr
    cdef dc[:, ::1] tmp = tmp_arr
    cdef dc[:, ::1] ga = ga_arr
    cdef dc[:, ::1] gb = gb_arr
    cdef const dc* m
    cdef dc* g
    cdef int i
    for i in range(p):
        m = &av[0, 0] if cv[i] == 0 else &bv[0, 0]
        _matmul(&prefix[i + 1, 0, 0], &prefix[i, 0, 0], m, n)
    for i in range(p - 1, -1, -1):
        g = &ga[0, 0] if cv[i] == 0 else &gb[0, 0]
        _acc_matmul(g, &suf[0, 0], &prefix[i, 0, 0], n)
        m = &av[0, 0] if cv[i] == 0 else &bv[0, 0]
        _matmul(&tmp[0, 0], m, &suf[0, 0], n)
        suf_arr[:, :] = tmp_arr
    return ga_arr, gb_arr
