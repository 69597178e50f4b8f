import numpy as np
import pytest

import bmvkit as bk
from bmvkit.errors import DimensionMismatch, DomainError
from bmvkit.matcore import PSD_TOL
from bmvkit.rng import Stream


def test_hermitian_symmetrization_is_exact():
    g = Stream(1).generator()
    for n in (1, 2, 4, 7):
        m = g.standard_normal((n, n)) + 1j * g.standard_normal((n, n))
        h = bk.hermitian(m)
        assert np.array_equal(h.data, h.data.conj().T)  # bitwise


def test_hermitian_rejects_bad_shapes():
    with pytest.raises(DimensionMismatch):
        bk.hermitian(np.zeros((2, 3)))
    with pytest.raises(DimensionMismatch):
        bk.hermitian(np.zeros((0, 0)))
    with pytest.raises(DomainError):
        bk.hermitian([[np.nan]])


def test_random_hermitian_1x1_is_real():
    m = bk.random_hermitian(1, Stream(3))
    assert m.data.shape == (1, 1)
    assert m.data[0, 0].imag == 0.0


def test_random_hermitian_deterministic_per_seed():
    m1 = bk.random_hermitian(3, Stream(5, 2))
    m2 = bk.random_hermitian(3, Stream(5, 2))
    m3 = bk.random_hermitian(3, Stream(5, 3))
    assert np.array_equal(m1.data, m2.data)
    assert not np.array_equal(m1.data, m3.data)
    assert m1.origin == (5, 2)


def test_random_hermitian_rejects_n0():
    with pytest.raises(DimensionMismatch):
        bk.random_hermitian(0, Stream(0))


def test_random_psd_eigenvalues_nonnegative():
    m = bk.random_psd(2, 2, Stream(7))
    w = np.linalg.eigvalsh(m.data)
    assert w.min() >= -1e-12 * max(1.0, w.max())
    assert m.classification == "positive"


def test_random_psd_rank_deficiency():
    m = bk.random_psd(3, 1, Stream(11))
    w = np.linalg.eigvalsh(m.data)
    assert abs(np.linalg.det(m.data)) < 1e-12 * max(1.0, w.max()) ** 3
    assert np.sum(w > 1e-10 * w.max()) == 1


def test_random_psd_exact_mode_gaussian_integers():
    m = bk.random_psd(3, 3, Stream(13), exact=True)
    assert m.exact is not None
    for row_re, row_im in zip(m.exact.re, m.exact.im):
        for x in row_re + row_im:
            assert x.denominator == 1
    assert m.exact.is_hermitian()
    # float view matches the exact payload
    assert np.array_equal(m.data, m.exact.to_complex())


def test_random_psd_rank_validation():
    with pytest.raises(DomainError):
        bk.random_psd(3, 0, Stream(0))
    with pytest.raises(DomainError):
        bk.random_psd(3, 4, Stream(0))


def test_eigh_diagonal_and_pauli():
    s = bk.eigh(bk.diagonal([2.0, 1.0]))
    assert np.allclose(s.eigenvalues, [1.0, 2.0])
    assert np.allclose(np.abs(s.basis), [[0, 1], [1, 0]])
    s2 = bk.eigh(bk.hermitian([[0, 1], [1, 0]]))
    assert np.allclose(s2.eigenvalues, [-1.0, 1.0])


def test_eigh_reconstruction_residual_500_random():
    g = Stream(17)
    for i in range(500):
        n = 1 + i % 16
        m = bk.random_hermitian(n, g.child(i))
        s = bk.eigh(m)
        rec = (s.basis * s.eigenvalues) @ s.basis.conj().T
        nrm = max(m.opnorm, 1e-300)
        assert np.max(np.abs(rec - m.data)) <= 1e-12 * n * nrm
        unit = s.basis.conj().T @ s.basis
        assert np.max(np.abs(unit - np.eye(n))) <= 1e-12 * n
        assert np.all(np.diff(s.eigenvalues) >= 0)


def test_matfn_exp_identity():
    out = bk.matfn(bk.identity(3), "exp")
    assert np.allclose(out.data, np.e * np.eye(3), rtol=1e-14)


def test_matfn_inv_sqrt():
    out = bk.matfn(bk.diagonal([4.0, 1.0]), "inv_sqrt")
    assert np.allclose(out.data, np.diag([0.5, 1.0]), rtol=1e-14)


def test_matfn_power_roundtrip():
    for i in range(5):
        m = bk.random_pd(4, Stream(19).child(i))
        back = bk.matfn(bk.matfn(m, "power", -1), "power", -1)
        assert np.max(np.abs(back.data - m.data)) <= 1e-10 * m.opnorm


def test_matfn_power_one_is_identity_map():
    m = bk.random_hermitian(5, Stream(23))
    out = bk.matfn(m, "power", 1)
    assert np.max(np.abs(out.data - m.data)) <= 1e-12 * max(m.opnorm, 1.0)


def test_matfn_domain_error_names_eigenvalue():
    m = bk.diagonal([1.0, -2.0])
    with pytest.raises(DomainError, match="-2"):
        bk.matfn(m, "inv_sqrt")
    with pytest.raises(DomainError):
        bk.matfn(m, "power", -2)
    with pytest.raises(DomainError):
        bk.matfn(m, "power", 0.5)


def test_dual_pair_identity_base():
    b = bk.random_hermitian(3, Stream(29))
    big_a, big_b = bk.dual_pair(bk.identity(3), b)
    assert np.allclose(big_a.data, np.eye(3), atol=1e-14)
    assert np.max(np.abs(big_b.data - b.data)) <= 1e-12 * max(b.opnorm, 1.0)


def test_dual_pair_scalar():
    big_a, big_b = bk.dual_pair(bk.diagonal([2.0]), bk.diagonal([1.0]))
    assert big_a.data[0, 0] == pytest.approx(0.5, abs=1e-15)
    assert big_b.data[0, 0] == pytest.approx(0.5, abs=1e-15)


def test_dual_pair_preserves_positivity():
    # Sylvester congruence: B = a^-1/2 b a^-1/2 is positive iff b is
    for i in range(10):
        a = bk.random_pd(3, Stream(31).child(i))
        b = bk.random_psd(3, 3, Stream(37).child(i))
        _, big_b = bk.dual_pair(a, b)
        w = np.linalg.eigvalsh(big_b.data)
        assert w.min() >= -1e-12 * max(big_b.opnorm, 1.0)
        assert big_b.classification == "positive"


def test_dual_pair_errors():
    with pytest.raises(DimensionMismatch):
        bk.dual_pair(bk.identity(2), bk.identity(3))
    with pytest.raises(DomainError):
        bk.dual_pair(bk.diagonal([1.0, 0.0]), bk.identity(2))


def test_psd_tolerance_constant():
    assert PSD_TOL == 1e-10
