"""Exact rational scalars: ``fractions.Fraction`` plus "p/q" text handling."""

from __future__ import annotations

import math
import re
from fractions import Fraction

from .errors import InvalidInputError

_RATIONAL_TEXT = re.compile(r"\s*[+-]?\d+(\s*/\s*\d+)?\s*")


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings; floats are refused."""
    if isinstance(x, bool):
        raise InvalidInputError("booleans are not rationals")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, str):
        if not _RATIONAL_TEXT.fullmatch(x):
            raise InvalidInputError(f"{x!r} is not a rational of the form p/q")
        try:
            return Fraction(x.replace(" ", ""))
        except ZeroDivisionError:
            raise InvalidInputError(f"{x!r} has a zero denominator") from None
    raise InvalidInputError(f"{x!r} is not an exact rational (floats are refused)")


def format_rational(x) -> str:
    return str(Fraction(x))


def reduce_mod1(x):
    """``x - floor(x)`` in [0, 1); exact for rationals."""
    return x - math.floor(x)
