"""Exact rational helpers: parsing, formatting, and exact square roots.

All quantities that must stay exact (rates, time shares, coordinates) are
`fractions.Fraction` values. Files carry them as integers or "p/q" strings.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .errors import ExactBackendError, InvalidInputError


def parse_rational(value, path: str = "") -> Fraction:
    """Parse an int, "p/q" string, decimal string, or float into a Fraction.

    Floats are read through their shortest decimal repr so that a JSON 0.1
    means exactly 1/10.
    """
    if isinstance(value, bool):
        raise InvalidInputError("bad_rational", f"not a number: {value!r}", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidInputError("bad_rational", f"non-finite number: {value!r}", path)
        return Fraction(str(value))
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise InvalidInputError("bad_rational", f"cannot parse rational from {value!r}", path)
    raise InvalidInputError("bad_rational", f"cannot parse rational from {value!r}", path)


def rational_str(value: Fraction) -> str:
    """Format a Fraction as "p/q", or plain "p" for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def exact_sqrt(value: Fraction) -> Fraction:
    """Square root of a nonnegative rational, exact or ExactBackendError."""
    if value < 0:
        raise ExactBackendError(f"negative radicand {value}")
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    raise ExactBackendError(f"sqrt({value}) is irrational; use the float backend")


def sqrt_or_float(value: Fraction):
    """Exact square root when it exists, float approximation otherwise."""
    try:
        return exact_sqrt(value)
    except ExactBackendError:
        return math.sqrt(value)
