import math
from fractions import Fraction

import numpy as np
import pytest

import bmvkit as bk
from bmvkit.errors import DomainError, ExactInputError
from bmvkit.rng import Stream
from bmvkit.words import (
    BinaryWord,
    _necklaces_by_canonicalization,
    _necklaces_fixed_content,
    term_report_rows,
    word_count,
)


def test_enumerate_words_small():
    assert [w.letters for w in bk.enumerate_words(2, 1)] == ["AB", "BA"]
    assert [w.letters for w in bk.enumerate_words(3, 0)] == ["AAA"]
    assert len(list(bk.enumerate_words(6, 3))) == 20


def test_enumerate_words_lexicographic_and_distinct():
    for p, r in [(5, 2), (6, 3), (7, 4)]:
        words = [w.letters for w in bk.enumerate_words(p, r)]
        assert words == sorted(words)
        assert len(set(words)) == math.comb(p, r)
        assert all(w.count("B") == r for w in words)


def test_enumerate_words_validation():
    with pytest.raises(DomainError):
        list(bk.enumerate_words(3, 4))


def test_necklaces_6_3_structure():
    classes = bk.necklaces(6, 3)
    table = {c.representative.letters: c.orbit_size for c in classes}
    assert table == {"AAABBB": 6, "AABABB": 6, "AABBAB": 6, "ABABAB": 2}


def test_necklaces_4_2_structure():
    classes = bk.necklaces(4, 2)
    table = {c.representative.letters: c.orbit_size for c in classes}
    assert table == {"AABB": 4, "ABAB": 2}


def test_necklaces_trivial_weight():
    classes = bk.necklaces(5, 0)
    assert len(classes) == 1
    assert classes[0].representative.letters == "AAAAA"
    assert classes[0].orbit_size == 1


def test_orbit_completeness_up_to_14():
    for p in range(1, 15):
        for r in range(p + 1):
            classes = bk.necklaces(p, r)
            assert sum(c.orbit_size for c in classes) == math.comb(p, r)
            reps = [c.representative.letters for c in classes]
            assert len(set(reps)) == len(reps)
            # representatives are minimal among their rotations
            for c in classes:
                s = c.representative.letters
                rots = {s[k:] + s[:k] for k in range(len(s))}
                assert s == min(rots)
                assert c.orbit_size == len(rots)


def test_fixed_content_generator_matches_canonicalization():
    # the simple method is the generator's own oracle
    for p in range(1, 19):
        for r in range(p + 1):
            fast = _necklaces_fixed_content(p, r)
            slow = _necklaces_by_canonicalization(p, r)
            assert [(c.representative.letters, c.orbit_size) for c in fast] == [
                (c.representative.letters, c.orbit_size) for c in slow
            ]


def test_word_trace_simple():
    a = bk.diagonal([2.0, 1.0])
    b = bk.identity(2)
    assert bk.word_trace(a, b, BinaryWord("AB")) == pytest.approx(3.0)


def test_word_trace_cyclic_invariance():
    a = bk.random_psd(3, 3, Stream(201).child(0))
    b = bk.random_psd(3, 3, Stream(201).child(1))
    w = BinaryWord("AABAB")
    base = bk.word_trace(a, b, w)
    for k in range(1, 5):
        assert bk.word_trace(a, b, w.rotate(k)) == pytest.approx(base, rel=1e-12)


def test_word_trace_exact_cyclic_invariance_is_exact():
    a = bk.random_psd(3, 3, Stream(203).child(0), exact=True)
    b = bk.random_psd(3, 3, Stream(203).child(1), exact=True)
    w = BinaryWord("AABBA")
    base = bk.word_trace(a, b, w, exact=True)
    for k in range(1, 5):
        assert bk.word_trace(a, b, w.rotate(k), exact=True) == base


def test_word_trace_exact_requires_rational_entries():
    a = bk.random_psd(2, 2, Stream(207).child(0))
    with pytest.raises(ExactInputError):
        bk.word_trace(a, a, BinaryWord("AB"), exact=True)


def test_coeff_bruteforce_hand_value():
    a = bk.diagonal([2.0, 1.0])
    b = bk.hermitian([[1.0, 1.0], [1.0, 1.0]], "positive")
    # three words of weight 1, each a rotation of AAB: Tr A^2 B = 5
    assert bk.coeff_bruteforce(a, b, 3, 1) == pytest.approx(15.0)


def test_coeff_bruteforce_weight_one_is_twice_trace_ab():
    a = bk.random_hermitian(3, Stream(211).child(0))
    b = bk.random_hermitian(3, Stream(211).child(1))
    want = 2 * float(np.trace(a.data @ b.data).real)
    assert bk.coeff_bruteforce(a, b, 2, 1) == pytest.approx(want, rel=1e-12)


def test_engines_agree_on_random_instance():
    a = bk.random_psd(3, 3, Stream(213).child(0))
    b = bk.random_psd(3, 3, Stream(213).child(1))
    dp = bk.trace_poly(a, b, 8).coeffs
    for r in range(9):
        bf = bk.coeff_bruteforce(a, b, 8, r)
        nk = bk.coeff_by_necklaces(a, b, 8, r)
        assert bf == pytest.approx(dp[r], rel=1e-10)
        assert nk == pytest.approx(dp[r], rel=1e-10)


def test_necklace_identity_pair_counts():
    got = bk.coeff_by_necklaces(bk.identity(2), bk.identity(2), 6, 3)
    assert got == pytest.approx(40.0)  # (6+6+6+2) * 2 = 2 * binomial(6,3)


def test_exact_necklace_equals_exact_bruteforce_bitwise():
    for i, (p, r) in enumerate([(8, 3), (7, 2), (10, 5), (6, 3)]):
        a = bk.random_psd(2 + i % 3, 2 + i % 3, Stream(217).child(2 * i), exact=True)
        b = bk.random_psd(2 + i % 3, 2 + i % 3, Stream(217).child(2 * i + 1), exact=True)
        bf = bk.coeff_bruteforce(a, b, p, r, exact=True)
        nk = bk.coeff_by_necklaces(a, b, p, r, exact=True)
        assert isinstance(bf, Fraction) and bf == nk


def test_exact_float_agreement():
    a = bk.random_psd(3, 3, Stream(219).child(0), exact=True)
    b = bk.random_psd(3, 3, Stream(219).child(1), exact=True)
    for r in range(5):
        ex = bk.coeff_bruteforce(a, b, 4, r, exact=True)
        fl = bk.coeff_bruteforce(a, b, 4, r)
        assert fl == pytest.approx(float(ex), rel=1e-9)


def test_coeff_p_zero():
    a = bk.random_psd(3, 3, Stream(221).child(0))
    assert bk.coeff_bruteforce(a, a, 0, 0) == pytest.approx(3.0)
    assert bk.coeff_by_necklaces(a, a, 0, 0) == pytest.approx(3.0)


def test_caps_enforced():
    a = bk.identity(2)
    with pytest.raises(DomainError):
        bk.coeff_bruteforce(a, a, 23, 1)
    with pytest.raises(DomainError):
        bk.coeff_by_necklaces(a, a, 27, 1)


def test_min_term_commuting_case():
    d1 = bk.diagonal([1.0, 2.0, 0.5])
    d2 = bk.diagonal([0.7, 0.2, 1.1])
    cls, value = bk.min_term(d1, d2, 6, 3)
    w1 = np.array([1.0, 2.0, 0.5])
    w2 = np.array([0.7, 0.2, 1.1])
    want = float(np.sum(w1**3 * w2**3))
    assert value == pytest.approx(want, rel=1e-12)
    # all classes tie; lexicographic tie-break selects the first representative
    assert cls.representative.letters == "AAABBB"


def test_min_term_candidates_include_negative_word_class():
    classes = {c.representative.letters for c in bk.necklaces(6, 3)}
    assert "AABBAB" in classes


def test_term_report_rows():
    a = bk.random_psd(2, 2, Stream(223).child(0), exact=True)
    b = bk.random_psd(2, 2, Stream(223).child(1), exact=True)
    rows = term_report_rows(a, b, 4, 2, exact=True)
    assert [r["representative"] for r in rows] == ["AABB", "ABAB"]
    assert sum(r["orbit_size"] for r in rows) == 6
    for row in rows:
        got = Fraction(int(row["exact_num"]), int(row["exact_den"]))
        assert float(got) == pytest.approx(row["value"], rel=1e-9)


def test_word_count():
    assert word_count(6, 3) == 20
