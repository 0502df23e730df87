"""Parsing and formatting of exact rational scalars.

Interchange files carry numbers as strings ("3/7", "0.25", "1e-3") so that
exact values survive JSON round trips. Internally everything exact is a
`fractions.Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, float]


class NumberFormatError(ValueError):
    pass


def parse_rational(value) -> Fraction:
    """Parse "p/q", decimal strings, ints, floats or Fractions into a Fraction.

    Floats are converted via their exact binary value, which is what the
    caller wrote; decimal *strings* are parsed exactly ("0.1" -> 1/10).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise NumberFormatError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise NumberFormatError(f"cannot parse rational from {value!r}") from exc
    raise NumberFormatError(f"cannot parse rational from {value!r}")


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def as_float(x: Scalar) -> float:
    return float(x)
