"""Exact rational scalars and the minus-infinity sentinel.

Every payoff, threshold, and resolution in this library is a
``fractions.Fraction``.  Floats are rejected at the boundary (parsing)
so exactness can't silently degrade mid-computation.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Rational = Fraction

# Order-compatible sentinels for "no offer" / unbounded thresholds.  They
# compare correctly against any Fraction but must never enter arithmetic.
NEG_INF = float("-inf")
POS_INF = float("inf")

RationalLike = Union[Fraction, int, str]


def rat(value: RationalLike) -> Fraction:
    """Parse an exact rational from an int, Fraction, or string.

    Accepted strings: "3", "-7/2", "0.25" (decimal strings are exact).
    Floats are rejected: binary floats do not carry the exactness
    contract, so callers must write "0.1" rather than 0.1.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational payoff")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        raise TypeError(
            f"float {value!r} rejected: pass an int, Fraction, or exact string "
            f"like '1/10'"
        )
    raise TypeError(f"cannot interpret {value!r} as a rational")


def fmt(value) -> str:
    """Canonical string for a rational: integer if integral, else 'p/q'."""
    if value == NEG_INF:
        return "-inf"
    f = Fraction(value)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def is_neg_inf(value) -> bool:
    return isinstance(value, float) and value == NEG_INF
