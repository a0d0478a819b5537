from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from brstlab.scalars import (
    DivisionError, I, InversionError, ONE, ZERO, Scalar, Series, format_scalar, lambda_divide,
    parse_scalar, series_compose, series_invert, series_mul,
)

rationals = st.builds(Fraction, st.integers(-60, 60), st.integers(1, 12))
scalars = st.builds(Scalar, rationals, rationals)


def ser(*cs):
    return Series([Scalar.coerce(c) for c in cs])


def test_reduced_form():
    s = Scalar(Fraction(4, -6), Fraction(0))
    assert s.re == Fraction(-2, 3) and s.re.denominator == 3
    assert Scalar(2, 0) == 2
    assert I * I == -1


@given(scalars, scalars, scalars)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + ZERO == a and a * ONE == a
    if a:
        assert a * a.inverse() == ONE


@given(scalars)
def test_format_parse_roundtrip(a):
    assert parse_scalar(format_scalar(a)) == a


def test_inverse_of_zero():
    with pytest.raises(ZeroDivisionError):
        ZERO.inverse()


def test_mul_examples():
    assert series_mul(ser(1, 1, 0), ser(1, -1, 0)) == ser(1, 0, -1)
    s = ser(3, I, 2)
    assert ser(1, 0, 0) * s == s
    assert ser(0, 1) * ser(0, 1) == ser(0, 0)


def test_invert_examples():
    assert series_invert(ser(1, -1, 0, 0)) == ser(1, 1, 1, 1)
    assert series_invert(ser(1)) == ser(1)
    assert series_invert(ser(2)) == ser(Fraction(1, 2))
    with pytest.raises(InversionError):
        series_invert(ser(0, 1))


def test_lambda_divide_examples():
    assert lambda_divide(ser(0, 1, 1)) == ser(1, 1)
    assert lambda_divide(ser(0, 0)) == ser(0)
    with pytest.raises(DivisionError):
        lambda_divide(ser(1, 1))


series3 = st.lists(scalars, min_size=4, max_size=4).map(Series)


@given(series3, series3, series3)
def test_series_ring(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(series3)
def test_series_inverse_two_sided(a):
    if not a[0]:
        return
    inv = series_invert(a)
    one = Series.constant(ONE, 3)
    assert a * inv == one and inv * a == one


@given(series3, series3)
def test_compose_is_substitution(a, b):
    b = Series([ZERO] + list(b.coeffs[1:]))
    # evaluate sum a_r b^r by repeated multiplication, independently of the Horner scheme
    acc, power = Series.constant(ZERO, 3), Series.constant(ONE, 3)
    for r in range(4):
        acc = acc + power.scale(a[r])
        power = power * b
    assert series_compose(a, b) == acc
