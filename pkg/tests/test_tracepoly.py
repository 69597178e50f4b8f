import itertools
import math

import numpy as np
import pytest

import bmvkit as bk
from bmvkit.errors import DimensionMismatch, DomainError
from bmvkit.numdiff import derivative, hermitian_directions
from bmvkit.rng import Stream
from bmvkit.tracepoly import coeff_scale


def _pair(n, seed, psd=True):
    if psd:
        a = bk.random_psd(n, n, Stream(seed).child(0))
        b = bk.random_psd(n, n, Stream(seed).child(1))
    else:
        a = bk.random_hermitian(n, Stream(seed).child(0))
        b = bk.random_hermitian(n, Stream(seed).child(1))
    return a, b


def _oracle_coeff(a, b, p, r):
    total = 0.0 + 0.0j
    for positions in itertools.combinations(range(p), r):
        cur = np.eye(a.n, dtype=complex)
        for i in range(p):
            cur = cur @ (b.data if i in positions else a.data)
        total += np.trace(cur)
    return total.real


def test_identity_pair_binomials():
    tp = bk.trace_poly(bk.identity(2), bk.identity(2), 3)
    assert np.allclose(tp.coeffs, [2, 6, 6, 2])


def test_orthogonal_projectors():
    tp = bk.trace_poly(bk.diagonal([1.0, 0.0]), bk.diagonal([0.0, 1.0]), 4)
    assert np.array_equal(tp.coeffs, [1, 0, 0, 0, 1])


def test_matches_bruteforce_word_sum():
    a, b = _pair(3, 101)
    tp = bk.trace_poly(a, b, 6)
    for r in range(7):
        want = _oracle_coeff(a, b, 6, r)
        assert tp.coeffs[r] == pytest.approx(want, rel=1e-11)


def test_endpoint_coefficients_are_pure_traces():
    a, b = _pair(4, 103, psd=False)
    p = 7
    tp = bk.trace_poly(a, b, p)
    tr_ap = float(np.trace(np.linalg.matrix_power(a.data, p)).real)
    tr_bp = float(np.trace(np.linalg.matrix_power(b.data, p)).real)
    assert tp.coeffs[0] == pytest.approx(tr_ap, rel=1e-12)
    assert tp.coeffs[p] == pytest.approx(tr_bp, rel=1e-12)


def test_p_zero():
    a, b = _pair(3, 107)
    tp = bk.trace_poly(a, b, 0)
    assert list(tp.coeffs) == [3.0]


def test_r_max_truncation():
    a, b = _pair(3, 109)
    full = bk.trace_poly(a, b, 8)
    part = bk.trace_poly(a, b, 8, r_max=2)
    assert np.allclose(full.coeffs[:3], part.coeffs, rtol=1e-14)
    assert part.r_max == 2


def test_validation():
    a, _ = _pair(2, 111)
    b3, _ = _pair(3, 113)
    with pytest.raises(DimensionMismatch):
        bk.trace_poly(a, b3, 3)
    with pytest.raises(DomainError):
        bk.trace_poly(a, a, -1)
    with pytest.raises(DomainError):
        bk.trace_poly(a, a, 3, r_max=4)


def test_swap_symmetry():
    a, b = _pair(3, 127)
    p = 7
    ab = bk.trace_poly(a, b, p).coeffs
    ba = bk.trace_poly(b, a, p).coeffs
    for r in range(p + 1):
        assert ab[r] == pytest.approx(ba[p - r], rel=1e-12)


def test_homogeneity():
    a, b = _pair(2, 131)
    p = 5
    base = bk.trace_poly(a, b, p).coeffs
    s, t = 1.7, 0.4
    scaled = bk.trace_poly(bk.hermitian(s * a.data, "positive"), bk.hermitian(t * b.data, "positive"), p).coeffs
    for r in range(p + 1):
        assert scaled[r] == pytest.approx(s ** (p - r) * t**r * base[r], rel=1e-12)


def test_unitary_invariance():
    a, b = _pair(3, 137)
    g = Stream(139).generator()
    m = g.standard_normal((3, 3)) + 1j * g.standard_normal((3, 3))
    q, _ = np.linalg.qr(m)
    ua = bk.hermitian(q @ a.data @ q.conj().T)
    ub = bk.hermitian(q @ b.data @ q.conj().T)
    c1 = bk.trace_poly(a, b, 6).coeffs
    c2 = bk.trace_poly(ua, ub, 6).coeffs
    for r in range(7):
        assert c2[r] == pytest.approx(c1[r], rel=1e-10)


def test_commuting_case_binomial_formula():
    d1 = bk.diagonal([0.5, 1.25, 2.0])
    d2 = bk.diagonal([1.0, 0.25, 3.0])
    p = 6
    coeffs = bk.trace_poly(d1, d2, p).coeffs
    w1 = np.array([0.5, 1.25, 2.0])
    w2 = np.array([1.0, 0.25, 3.0])
    for r in range(p + 1):
        want = math.comb(p, r) * float(np.sum(w1 ** (p - r) * w2**r))
        assert coeffs[r] == pytest.approx(want, rel=1e-10)


def test_derivative_at_zero_variants():
    a, b = _pair(2, 149)
    p = 4
    tr_ap = float(np.trace(np.linalg.matrix_power(a.data, p)).real)
    assert bk.derivative_at_zero(a, b, p, 0) == pytest.approx(tr_ap, rel=1e-12)
    # identity pair: 2! * c_{3,2} = 2 * 6
    assert bk.derivative_at_zero(bk.identity(2), bk.identity(2), 3, 2) == pytest.approx(12.0)
    with pytest.warns(UserWarning):
        assert bk.derivative_at_zero(a, b, 3, 5) == 0.0


def test_derivative_at_zero_matches_finite_differences():
    a, b = _pair(3, 151)
    p, r = 5, 3
    f = lambda t: float(np.trace(np.linalg.matrix_power(a.data + t * b.data, p)).real)
    fd, _ = derivative(f, 0.0, r, h0=0.1 / max(1.0, b.opnorm))
    got = bk.derivative_at_zero(a, b, p, r)
    assert got == pytest.approx(fd, rel=1e-6)


def test_gradient_pure_power_cases():
    a, b = _pair(3, 157)
    zero = bk.hermitian(np.zeros((3, 3)))
    p = 5
    ga, gb = bk.coeff_gradient(a, zero, p, 0)
    want = p * np.linalg.matrix_power(a.data, p - 1)
    assert np.max(np.abs(ga.data - want)) <= 1e-12 * a.opnorm ** (p - 1) * p
    assert np.max(np.abs(gb.data)) == 0.0
    ga2, gb2 = bk.coeff_gradient(zero, b, p, p)
    want2 = p * np.linalg.matrix_power(b.data, p - 1)
    assert np.max(np.abs(gb2.data - want2)) <= 1e-12 * b.opnorm ** (p - 1) * p
    assert np.max(np.abs(ga2.data)) == 0.0


def test_gradient_directional_derivatives():
    a, b = _pair(3, 163)
    p, r = 6, 3
    ga, gb = bk.coeff_gradient(a, b, p, r)
    rng = Stream(167).generator()
    scale = coeff_scale(a, b, p, r)
    for h in hermitian_directions(3, 20, rng):
        fa = lambda t: bk.trace_poly(bk.hermitian(a.data + t * h), b, p, r).coeffs[r]
        fd, _ = derivative(fa, 0.0, 1, h0=0.05)
        want = float(np.trace(ga.data @ h).real)
        assert fd == pytest.approx(want, rel=1e-5, abs=1e-10 * scale)
        fb = lambda t: bk.trace_poly(a, bk.hermitian(b.data + t * h), p, r).coeffs[r]
        fd2, _ = derivative(fb, 0.0, 1, h0=0.05)
        want2 = float(np.trace(gb.data @ h).real)
        assert fd2 == pytest.approx(want2, rel=1e-5, abs=1e-10 * scale)


def test_gradient_is_hermitian():
    a, b = _pair(4, 173)
    ga, gb = bk.coeff_gradient(a, b, 5, 2)
    assert np.array_equal(ga.data, ga.data.conj().T)
    assert np.array_equal(gb.data, gb.data.conj().T)
