"""Conversions between user-facing numbers and exact rationals."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, float, Fraction]

# relative tolerance for binary64 comparisons
REL_TOL = 1e-12


def to_fraction(x) -> Fraction:
    """Exact rational for ``x``.

    Floats are read through their shortest decimal repr, so ``0.9`` becomes
    ``9/10`` rather than the nearest binary64 value. Strings accept both
    ``"p/q"`` and decimal notation.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} exactly")
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        return Fraction(x.strip())
    # numpy scalars and friends
    return to_fraction(float(x))


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def leq_tol(a: float, b: float, rel: float = REL_TOL) -> bool:
    """``a <= b`` up to a relative tolerance; ties count as satisfied."""
    return a <= b + rel * max(abs(a), abs(b), 1e-300)


def fmt(x) -> str | float | None:
    """JSON-friendly rendering: exact rationals as ``"p/q"`` strings."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    return float(x)
