from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from stabilis.rational import EQ, GT, LT, compare, fmt, normalize, parse_rational, to_rational

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)


@pytest.mark.parametrize("n, d, num, den", [(2, 4, 1, 2), (3, -6, -1, 2), (0, 7, 0, 1)])
def test_normalize(n, d, num, den):
    r = normalize(n, d)
    assert (r.numerator, r.denominator) == (num, den)


def test_normalize_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        normalize(1, 0)


def test_arithmetic_examples():
    assert Fraction(1, 2) + Fraction(1, 2) == 1
    assert Fraction(1, 3) * 3 == 1
    # long hand: 11/4 - 12/4
    r = Fraction(11, 4) - 3
    assert (r.numerator, r.denominator) == (11 - 3 * 4, 4) == (-1, 4)


def test_compare_examples():
    assert compare(Fraction(1, 2), Fraction(2, 4)) == EQ
    assert compare(Fraction(-1), Fraction(0)) == LT
    assert 7 * 4 > 9 * 3
    assert compare(Fraction(7, 3), Fraction(9, 4)) == GT


@pytest.mark.parametrize("token, value", [("3", 3), ("-2/6", Fraction(-1, 3)), ("+5/10", Fraction(1, 2)), (" 0/9 ", 0)])
def test_parse_rational(token, value):
    assert parse_rational(token) == value


@pytest.mark.parametrize("token", ["1.5", "1e3", "1/0", "", "a", "1/-2", "1_000", "1 / 2", "0x10"])
def test_parse_rational_rejects(token):
    with pytest.raises(ValueError):
        parse_rational(token)


def test_to_rational_rejects_floats_and_bools():
    with pytest.raises(TypeError):
        to_rational(0.5)
    with pytest.raises(TypeError):
        to_rational(True)


def test_fmt():
    assert fmt(Fraction(6, 3)) == "2"
    assert fmt(Fraction(-3, 6)) == "-1/2"
    assert parse_rational(fmt(Fraction(-7, 12))) == Fraction(-7, 12)


def _canonical(r):
    return r.denominator > 0 and (r.numerator != 0 or r.denominator == 1)


@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    for r in (a + b, a - b, a * b):
        assert _canonical(r)
    if b:
        assert (a / b) * b == a


@given(rationals, rationals)
def test_compare_matches_sign(a, b):
    d = a - b
    assert compare(a, b) == (d > 0) - (d < 0)


@given(rationals)
def test_fmt_round_trip(a):
    assert parse_rational(fmt(a)) == a
