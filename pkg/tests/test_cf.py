import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cfgrowth.cf import (
    Cylinder,
    DigitSequence,
    convergents_of,
    cylinder_of,
    expand_certified,
    legendre_check,
    value_of,
    verify_classical_bounds,
)
from cfgrowth.errors import DomainError, InputError, ModeError
from cfgrowth.logscalar import LogScalar

digit_lists = st.lists(st.integers(min_value=1, max_value=50), min_size=1, max_size=12)


def canonical(digits):
    digits = list(digits)
    if digits[-1] == 1:
        digits[-1] = 2
    return tuple(digits)


# --- expansion -------------------------------------------------------------


def test_expand_five_eighths():
    # Hand Gauss chain: 5/8 -> 3/5 -> 2/3 -> 1/2 -> 0.
    seq = expand_certified(Fraction(5, 8), 10)
    assert seq.exact_digits == (1, 1, 1, 2)


def test_expand_zero_is_empty():
    assert expand_certified(Fraction(0), 5).exact_digits == ()
    assert expand_certified(Fraction(0), 5, Fraction(1, 100)).exact_digits == ()


def test_expand_rejects_out_of_domain():
    with pytest.raises(DomainError):
        expand_certified(Fraction(3, 2), 5)
    with pytest.raises(DomainError):
        expand_certified(Fraction(-1, 2), 5)
    with pytest.raises(DomainError):
        expand_certified(Fraction(1, 2), 5, Fraction(-1, 4))


def test_expand_truncates_at_max_depth():
    seq = expand_certified(Fraction(5, 8), 2)
    assert seq.exact_digits == (1, 1)


def test_golden_ratio_dyadic_certified_digits():
    # x = 128-bit dyadic approximation of (sqrt(5)-1)/2; all certified
    # digits must equal 1 and at least 40 of them survive.
    scale = 1 << 128
    from math import isqrt

    j = (isqrt(5 * scale * scale) - scale) // 2
    x = Fraction(j, scale)
    seq = expand_certified(x, 40, Fraction(1, scale))
    assert len(seq) >= 40
    assert set(seq.exact_digits[:40]) == {1}


def test_certified_interval_straddling_half_has_empty_prefix():
    seq = expand_certified(Fraction(1, 2), 10, Fraction(1, 100))
    assert seq.exact_digits == ()


def test_certified_interval_reaching_one():
    # [0.7, 1) shares only the first digit.
    seq = expand_certified(Fraction(85, 100), 10, Fraction(15, 100))
    assert seq.exact_digits == (1,)


@given(digit_lists, st.integers(min_value=1, max_value=6))
@settings(max_examples=60, deadline=None)
def test_certified_prefix_monotone_in_radius(digits, k):
    x = value_of(DigitSequence.exact(canonical(digits)))
    wide = expand_certified(x, 12, Fraction(1, 10 ** k))
    narrow = expand_certified(x, 12, Fraction(1, 10 ** (k + 2)))
    assert narrow.exact_digits[: len(wide.exact_digits)] == wide.exact_digits
    assert len(narrow.exact_digits) >= len(wide.exact_digits)


@given(digit_lists)
@settings(max_examples=80, deadline=None)
def test_round_trip_value_expand(digits):
    digits = canonical(digits)
    x = value_of(DigitSequence.exact(digits))
    assert expand_certified(x, len(digits) + 2).exact_digits == digits


# --- convergents -----------------------------------------------------------


def test_convergents_fibonacci():
    convs = convergents_of(DigitSequence.exact((1, 1, 1, 1, 1)))
    assert [c.q_cur for c in convs] == [1, 2, 3, 5, 8]


def test_convergents_single_digit():
    (c,) = convergents_of(DigitSequence.exact((2,)))
    assert (c.p_cur, c.q_cur) == (1, 2)


def test_convergents_hand_recursion():
    # p: 1, 2, 7 and q: 1, 3, 10 for digits (1, 2, 3).
    convs = convergents_of(DigitSequence.exact((1, 2, 3)))
    assert [(c.p_cur, c.q_cur) for c in convs] == [(1, 1), (2, 3), (7, 10)]


def test_convergents_reject_logspace():
    seq = DigitSequence.logspace([LogScalar.from_log(1.0)])
    with pytest.raises(ModeError):
        convergents_of(seq)


@given(digit_lists)
@settings(max_examples=100, deadline=None)
def test_determinant_identity(digits):
    for c in convergents_of(DigitSequence.exact(digits)):
        assert c.determinant() == (-1) ** (c.depth - 1)
        assert c.q_cur >= c.q_prev >= 0


# --- values ----------------------------------------------------------------


def test_value_examples():
    assert value_of(DigitSequence.exact((1, 1, 1, 2))) == Fraction(5, 8)
    assert value_of(DigitSequence.exact((2,))) == Fraction(1, 2)
    assert value_of(DigitSequence.exact((1, 2, 3))) == Fraction(7, 10)
    assert value_of(DigitSequence.exact(())) == Fraction(0)


# --- cylinders ---------------------------------------------------------------


def test_cylinder_examples():
    c1 = cylinder_of(DigitSequence.exact((1,)))
    assert (c1.interval_lo, c1.interval_hi) == (Fraction(1, 2), Fraction(1))
    c2 = cylinder_of(DigitSequence.exact((2,)))
    assert (c2.interval_lo, c2.interval_hi) == (Fraction(1, 3), Fraction(1, 2))
    c11 = cylinder_of(DigitSequence.exact((1, 1)))
    assert (c11.interval_lo, c11.interval_hi) == (Fraction(1, 2), Fraction(2, 3))


@given(digit_lists)
@settings(max_examples=100, deadline=None)
def test_cylinder_length_identity(digits):
    cyl = cylinder_of(DigitSequence.exact(digits))
    conv = cyl.convergents
    assert cyl.length == Fraction(1, conv.q_cur * (conv.q_cur + conv.q_prev))


@given(digit_lists, st.integers(min_value=1, max_value=50))
@settings(max_examples=100, deadline=None)
def test_cylinder_nesting(digits, extra):
    parent = cylinder_of(DigitSequence.exact(digits))
    child = cylinder_of(DigitSequence.exact(tuple(digits) + (extra,)))
    assert parent.contains_interval(child)
    assert child.length < parent.length


@given(digit_lists)
@settings(max_examples=60, deadline=None)
def test_cylinder_contains_its_value_points(digits):
    digits = canonical(digits)
    cyl = cylinder_of(DigitSequence.exact(digits))
    x = value_of(DigitSequence.exact(tuple(digits) + (7,)))
    assert cyl.contains_point(x)


# --- Legendre-style checks ---------------------------------------------------


def test_legendre_five_eighths():
    hits = legendre_check(Fraction(5, 8), 8)
    assert all(flag for _, _, flag in hits)
    allowed = {(1, 2), (2, 3), (3, 5), (5, 8)}
    assert {(p, q) for p, q, _ in hits} <= allowed
    # Brute force over every reduced fraction confirms the hit set.
    brute = set()
    for q in range(1, 9):
        for p in range(0, q):
            from math import gcd

            if gcd(p, q) == 1 and abs(Fraction(5, 8) - Fraction(p, q)) < Fraction(1, 2 * q * q):
                brute.add((p, q))
    assert {(p, q) for p, q, _ in hits} == brute


def test_legendre_half():
    assert legendre_check(Fraction(1, 2), 2) == [(1, 2, True)]


def test_legendre_seven_tenths():
    hits = legendre_check(Fraction(7, 10), 50)
    assert hits and all(flag for _, _, flag in hits)


def test_legendre_zero_over_one_counts_as_convergent():
    hits = legendre_check(Fraction(1, 3), 1)
    assert (0, 1, True) in hits


# --- classical bounds --------------------------------------------------------


def test_bounds_all_ones():
    digits = DigitSequence.exact((1, 1, 1, 1, 1))
    x = value_of(DigitSequence.exact((1, 1, 1, 1, 1, 2)))
    assert verify_classical_bounds(digits, x).all_ok


def test_bounds_hand_sandwich():
    # a_2(5/12) = 2 and |5/12 - 1/2| = 1/12 sits inside (1/24, 1/8).
    report = verify_classical_bounds(DigitSequence.exact((2,)), Fraction(5, 12))
    assert report.all_ok
    assert report.rows[0].approx_sandwich_ok is True


def test_bounds_depth_one_power_bound():
    for a in (1, 7, 50):
        report = verify_classical_bounds(
            DigitSequence.exact((a,)), value_of(DigitSequence.exact((a, 5)))
        )
        assert report.rows[0].q_power_lower_ok


def test_bounds_prefix_mismatch():
    with pytest.raises(InputError):
        verify_classical_bounds(DigitSequence.exact((3,)), Fraction(5, 8))


def test_bounds_skip_final_depth_without_next_digit():
    report = verify_classical_bounds(DigitSequence.exact((1, 1, 1, 2)), Fraction(5, 8))
    assert report.rows[-1].approx_sandwich_ok is None
    assert report.all_ok


def test_bounds_random_sequences():
    rng = random.Random(90125)
    for _ in range(50):
        depth = rng.randint(2, 10)
        digits = canonical(rng.randint(1, 50) for _ in range(depth))
        x = value_of(DigitSequence.exact(digits))
        assert verify_classical_bounds(DigitSequence.exact(digits), x).all_ok
