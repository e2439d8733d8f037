"""Unit tests for reduced-word enumeration and freeness verification."""

import pytest
from hypothesis import given, strategies as st

from lps.quaternions import build_generator_set
from lps.torus import build_torus_genset
from lps.words import (
    EnumerationBudgetError,
    Word,
    enumerate_sphere,
    evaluate_word,
    is_reduced,
    verify_freeness,
    word_counts,
)


def test_word_counts_hand_values():
    assert word_counts(3, 2) == (12, 17)
    assert word_counts(5, 5) == (3750, 4687)
    assert word_counts(3, 8) == (4 * 3**7, 13121)
    assert word_counts(2, 3) == (3 * 4, 1 + 3 + 6 + 12)
    assert word_counts(7, 0) == (1, 1)


def test_word_counts_degenerate_line():
    for n in range(12):
        assert word_counts(1, n) == ((2, 2 * n + 1) if n else (1, 1))


def test_word_counts_rejects_bad_input():
    with pytest.raises(ValueError):
        word_counts(0, 3)
    with pytest.raises(ValueError):
        word_counts(3, -1)


@given(st.integers(min_value=1, max_value=10), st.integers(min_value=1, max_value=40))
def test_word_count_recurrences(q, n):
    sphere_n, ball_n = word_counts(q, n)
    sphere_next, ball_next = word_counts(q, n + 1)
    assert sphere_next == q * sphere_n if n >= 1 else True
    assert ball_next == ball_n + sphere_next
    assert ball_n == sum(word_counts(q, k)[0] for k in range(n + 1))


def test_is_reduced():
    inv = (1, 0, 3, 2)
    assert is_reduced((), inv)
    assert is_reduced((0, 2, 0), inv)
    assert not is_reduced((0, 1), inv)
    assert not is_reduced((2, 3, 0), inv)
    assert is_reduced((0, 0), inv), "repeats are reduced when not mutual inverses"


def test_enumerate_sphere_counts_and_order():
    sanov = build_torus_genset("sanov")
    for n in range(5):
        words = list(enumerate_sphere(sanov, n))
        assert len(words) == word_counts(sanov.q, n)[0]
        assert all(len(w) == n for w in words)
        letters = [w.letters for w in words]
        assert letters == sorted(letters), "lexicographic enumeration"
        assert all(is_reduced(l, sanov.inverse_of) for l in letters)


def test_enumerate_sphere_matches_rotation_rank():
    genset = build_generator_set(5)
    words = list(enumerate_sphere(genset, 2))
    assert len(words) == word_counts(5, 2)[0] == 30


def test_evaluate_word_matches_manual_product():
    sanov = build_torus_genset("sanov")
    a, b = sanov.elements[0], sanov.elements[1]
    word = Word((0, 1, 0))
    assert evaluate_word(sanov, word) == (a * b) * a


def test_evaluate_word_rejects_unreduced():
    sanov = build_torus_genset("sanov")
    bad = Word((0, sanov.inverse_of[0]))
    with pytest.raises(ValueError):
        evaluate_word(sanov, bad)
    with pytest.raises(ValueError):
        evaluate_word(sanov, Word((99,)))


def test_empty_word_is_identity():
    sanov = build_torus_genset("sanov")
    assert evaluate_word(sanov, Word(())) == sanov.identity


def test_freeness_small_rotation_ball():
    report = verify_freeness(build_generator_set(5), 3)
    assert report.is_free_to_radius
    assert report.radius_checked == 3
    assert report.ball_size_expected == 187
    assert report.ball_size_found == 187
    assert report.first_collision is None


def test_freeness_sanov_small():
    report = verify_freeness(build_torus_genset("sanov"), 5)
    assert report.is_free_to_radius
    assert report.ball_size_found == word_counts(3, 5)[1] == 485


def test_freeness_detects_relations():
    # upper-triangular unipotent matrices commute, so a b a^-1 b^-1 collides
    genset = build_torus_genset((((1, 1), (0, 1)), ((1, 2), (0, 1))))
    report = verify_freeness(genset, 3)
    assert not report.is_free_to_radius
    assert report.ball_size_found < report.ball_size_expected
    assert report.first_collision is not None
    w1, w2 = report.first_collision
    assert evaluate_word(genset, w1) == evaluate_word(genset, w2)
    assert w1.letters != w2.letters


def test_freeness_budget_guard():
    with pytest.raises(EnumerationBudgetError):
        verify_freeness(build_generator_set(5), 6, budget=100)
