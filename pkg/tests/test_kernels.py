"""Backend agreement and independent oracles for the hot kernels."""

import itertools

import numpy as np
import pytest

from bmvkit._kernels import _pykernels
from bmvkit.rng import Stream

try:
    from bmvkit._kernels import _cykernels

    BACKENDS = [_pykernels, _cykernels]
except ImportError:
    _cykernels = None
    BACKENDS = [_pykernels]


def _pair(n, seed):
    g = Stream(seed).generator()
    a = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
    b = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
    return (a + a.conj().T) / 2, (b + b.conj().T) / 2


def _oracle_coeff(a, b, p, r):
    """Sum of word traces by plain numpy products (independent of the kernels)."""
    total = 0.0 + 0.0j
    for positions in itertools.combinations(range(p), r):
        cur = np.eye(a.shape[0], dtype=complex)
        for i in range(p):
            cur = cur @ (b if i in positions else a)
        total += np.trace(cur)
    return total


@pytest.mark.parametrize("kernels", BACKENDS, ids=lambda k: k.BACKEND)
def test_poly_traces_against_word_sum(kernels):
    for n, p in [(1, 4), (2, 5), (3, 6), (4, 7)]:
        a, b = _pair(n, 100 + n)
        traces = kernels.poly_traces(a, b, p, p)
        for r in range(p + 1):
            want = _oracle_coeff(a, b, p, r)
            scale = max(abs(want), 1.0)
            assert abs(traces[r] - want) <= 1e-10 * scale


@pytest.mark.parametrize("kernels", BACKENDS, ids=lambda k: k.BACKEND)
def test_poly_traces_truncation(kernels):
    a, b = _pair(3, 7)
    full = kernels.poly_traces(a, b, 8, 8)
    part = kernels.poly_traces(a, b, 8, 3)
    assert np.allclose(full[:4], part, rtol=1e-14)


@pytest.mark.parametrize("kernels", BACKENDS, ids=lambda k: k.BACKEND)
def test_word_traces_against_direct_products(kernels):
    a, b = _pair(3, 11)
    words = list(itertools.product([0, 1], repeat=6))
    codes = np.array(words, dtype=np.uint8)
    got = kernels.word_traces(a, b, codes)
    for word, val in zip(words, got):
        cur = np.eye(3, dtype=complex)
        for c in word:
            cur = cur @ (a if c == 0 else b)
        assert abs(val - np.trace(cur)) <= 1e-12 * max(1.0, abs(np.trace(cur)))


@pytest.mark.parametrize("kernels", BACKENDS, ids=lambda k: k.BACKEND)
def test_word_traces_empty_word(kernels):
    a, b = _pair(3, 13)
    got = kernels.word_traces(a, b, np.zeros((2, 0), dtype=np.uint8))
    assert np.allclose(got, [3.0, 3.0])


@pytest.mark.parametrize("kernels", BACKENDS, ids=lambda k: k.BACKEND)
def test_adjoints_match_complex_step_like_fd(kernels):
    a, b = _pair(3, 17)
    p, r = 5, 2
    raw_a, raw_b = kernels.poly_coeff_adjoint(a, b, p, r)
    g = Stream(19).generator()
    h = g.standard_normal((3, 3)) + 1j * g.standard_normal((3, 3))
    h = (h + h.conj().T) / 2
    eps = 1e-6
    up = kernels.poly_traces(a + eps * h, b, p, r)[r].real
    dn = kernels.poly_traces(a - eps * h, b, p, r)[r].real
    fd = (up - dn) / (2 * eps)
    ga = (raw_a + raw_a.conj().T) / 2
    an = np.trace(ga @ h).real
    assert abs(fd - an) <= 1e-5 * max(1.0, abs(an))


@pytest.mark.parametrize("kernels", BACKENDS, ids=lambda k: k.BACKEND)
def test_word_adjoint_simple_words(kernels):
    a, b = _pair(3, 23)
    # d Re Tr(A)/dA = I
    ga, gb = kernels.word_adjoint(a, b, np.array([0], dtype=np.uint8))
    assert np.allclose(ga, np.eye(3))
    assert np.allclose(gb, 0)
    # d Re Tr(AB): raw dA = B, dB = A
    ga, gb = kernels.word_adjoint(a, b, np.array([0, 1], dtype=np.uint8))
    assert np.allclose(ga, b, rtol=1e-14)
    assert np.allclose(gb, a, rtol=1e-14)


@pytest.mark.skipif(_cykernels is None, reason="compiled backend unavailable")
def test_backends_agree_closely():
    for n, p, r in [(2, 6, 3), (3, 9, 4), (4, 12, 12)]:
        a, b = _pair(n, 29 + n)
        t1 = _pykernels.poly_traces(a, b, p, min(r, p))
        t2 = _cykernels.poly_traces(a, b, p, min(r, p))
        assert np.max(np.abs(t1 - t2)) <= 1e-12 * max(1.0, np.max(np.abs(t1)))
        ga1, gb1 = _pykernels.poly_coeff_adjoint(a, b, p, min(r, p))
        ga2, gb2 = _cykernels.poly_coeff_adjoint(a, b, p, min(r, p))
        assert np.max(np.abs(ga1 - ga2)) <= 1e-12 * max(1.0, np.max(np.abs(ga1)))
        assert np.max(np.abs(gb1 - gb2)) <= 1e-12 * max(1.0, np.max(np.abs(gb1)))
    a, b = _pair(3, 41)
    g = Stream(43).generator()
    codes = g.integers(0, 2, size=(64, 9)).astype(np.uint8)
    w1 = _pykernels.word_traces(a, b, codes)
    w2 = _cykernels.word_traces(a, b, codes)
    assert np.max(np.abs(w1 - w2)) <= 1e-12 * max(1.0, np.max(np.abs(w1)))
    for row in codes[:5]:
        ga1, gb1 = _pykernels.word_adjoint(a, b, row)
        ga2, gb2 = _cykernels.word_adjoint(a, b, row)
        assert np.max(np.abs(ga1 - ga2)) <= 1e-12 * max(1.0, np.max(np.abs(ga1)))
        assert np.max(np.abs(gb1 - gb2)) <= 1e-12 * max(1.0, np.max(np.abs(gb1)))


def test_pure_python_env_override(monkeypatch):
    import importlib
    import subprocess
    import sys

    code = (
        "import os; os.environ['BMV_PURE_PYTHON']='1'; "
        "import bmvkit._kernels as k; print(k.BACKEND)"
    )
    out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert out.stdout.strip() == "python"
