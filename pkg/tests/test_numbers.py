from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest

from onebasket._numbers import fmt, is_exact, leq_tol, to_fraction


@pytest.mark.parametrize(
    "value, want",
    [(0.9, F(9, 10)), ("9/10", F(9, 10)), ("0.25", F(1, 4)), (3, F(3)), (np.float64(0.1), F(1, 10))],
)
def test_to_fraction(value, want):
    assert to_fraction(value) == want


def test_to_fraction_rejects():
    with pytest.raises(ValueError):
        to_fraction(float("inf"))
    with pytest.raises(TypeError):
        to_fraction(True)


def test_helpers():
    assert is_exact(F(1, 2)) and is_exact(3) and not is_exact(0.5) and not is_exact(True)
    assert leq_tol(1.0 + 1e-13, 1.0) and not leq_tol(1.0 + 1e-9, 1.0)
    assert fmt(F(3, 4)) == "3/4" and fmt(F(2)) == "2" and fmt(0.5) == 0.5 and fmt(None) is None
