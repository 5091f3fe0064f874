"""Exact rational helpers and the 2-decimal display rounding used in tables.

All published table values are round-half-up renderings of exact rationals,
so every quantity that can be fractional is kept as a Fraction until the
moment it is printed.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def as_fraction(value) -> Fraction:
    """Convert user-facing numbers to an exact Fraction.

    Floats go through their shortest decimal repr, so values typed as 0.35
    become exactly 7/20 instead of the nearest binary double.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as an exact fraction")


def round_half_up(value, digits: int = 2) -> Fraction:
    """Round to `digits` decimals, ties away from zero, exactly."""
    x = as_fraction(value)
    scale = 10**digits
    scaled = x * scale
    if scaled >= 0:
        n = (scaled + Fraction(1, 2)).__floor__()
    else:
        n = -((-scaled + Fraction(1, 2)).__floor__())
    return Fraction(n, scale)


def format_2dec(value) -> str:
    """Render a number the way the result tables print it: 2 decimals."""
    n = round_half_up(value, 2) * 100
    n = int(n)
    sign = "-" if n < 0 else ""
    n = abs(n)
    return f"{sign}{n // 100}.{n % 100:02d}"
