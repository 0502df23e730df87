from fractions import Fraction

import pytest

from bicomb.rationals import NumberFormatError, as_float, format_rational, parse_rational


def test_parse_fraction_string():
    assert parse_rational("3/7") == Fraction(3, 7)
    assert parse_rational("-3/7") == Fraction(-3, 7)


def test_parse_decimal_string_is_exact():
    # decimal strings parse exactly, unlike float(0.1)
    assert parse_rational("0.1") == Fraction(1, 10)
    assert parse_rational("1e-3") == Fraction(1, 1000)
    assert parse_rational(" 0.25 ") == Fraction(1, 4)


def test_parse_int_and_fraction_passthrough():
    assert parse_rational(5) == Fraction(5)
    q = Fraction(2, 3)
    assert parse_rational(q) is q or parse_rational(q) == q


def test_parse_float_uses_binary_value():
    assert parse_rational(0.5) == Fraction(1, 2)
    assert parse_rational(0.1) == Fraction(0.1)  # exact binary expansion
    assert parse_rational(0.1) != Fraction(1, 10)


@pytest.mark.parametrize("bad", ["", "x", "1/0", "2.5.3", None, [1], True])
def test_parse_rejects_garbage(bad):
    with pytest.raises(NumberFormatError):
        parse_rational(bad)


def test_format_roundtrip():
    for q in [Fraction(0), Fraction(7), Fraction(-3, 8), Fraction(22, 7)]:
        assert parse_rational(format_rational(q)) == q
    assert format_rational(Fraction(4, 2)) == "2"


def test_as_float():
    assert as_float(Fraction(1, 4)) == 0.25
    assert as_float(1.5) == 1.5
