from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import CATALOG, LATTICE
from onebasket.dist import (
    ConvexTransform,
    DiscretePareto,
    Frechet1,
    LogHarmonic,
    Pareto,
    StPetersburg,
    Transformed,
    Trivial,
    apply_transform,
    from_spec,
)
from onebasket.montecarlo import hoeffding_halfwidth

NAMES = sorted(CATALOG)


@pytest.mark.parametrize("name", NAMES)
@settings(max_examples=60, deadline=None)
@given(a=st.floats(0, 200), b=st.floats(0, 200))
def test_survival_monotone_in_unit_interval(name, a, b):
    d = CATALOG[name]
    lo, hi = min(a, b), max(a, b)
    s_lo, s_hi = float(d.survival(lo)), float(d.survival(hi))
    assert 0 <= s_hi <= s_lo <= 1


@pytest.mark.parametrize("name", sorted(LATTICE))
def test_right_continuous_at_breakpoints(name):
    d = LATTICE[name]
    eps = F(1, 10**9)
    for b in d.breakpoints(40):
        assert d.survival(b) == d.survival(b + eps)
        if b > d.support_min:
            assert d.survival(b - eps) >= d.survival(b)


@pytest.mark.parametrize("name", NAMES)
def test_sampler_matches_survival(name):
    d = CATALOG[name]
    n = 10**6
    xs = d.sample_array(np.random.default_rng(7), n)
    probes = np.quantile(xs, np.linspace(0.05, 0.95, 10))
    h = hoeffding_halfwidth(n, 1e-6)
    for x in probes:
        assert abs(np.mean(xs > x) - float(d.survival(float(x)))) <= h


def test_sampling_is_seeded():
    d = Pareto(0.7, 2.0)
    a = d.sample_array(np.random.default_rng(3), 100)
    b = d.sample_array(np.random.default_rng(3), 100)
    assert np.array_equal(a, b)


def test_discrete_pareto_values():
    d = DiscretePareto()
    assert d.survival(0) == F(1, 2)
    assert d.survival(F(9, 10)) == F(1, 2)
    assert d.survival(1) == F(1, 3)
    assert d.survival(F(-1, 2)) == 1
    assert sum(DiscretePareto.pmf(k) for k in range(100)) == 1 - d.survival(99)
    assert DiscretePareto.pmf(0) == F(1, 2)


def test_st_petersburg_values():
    s = StPetersburg()
    assert s.survival(F(3, 2)) == 1
    assert s.survival(2) == F(1, 2)
    assert s.survival(1023) == F(1, 2**9)
    assert s.survival(1024) == F(1, 2**10)
    atoms = dict(s.atoms(64))
    assert atoms[F(8)] == F(1, 8)


def test_continuous_values():
    assert Pareto(1.0, 1.0).survival(4.0) == pytest.approx(0.25)
    assert Pareto(2.0, 1.0).survival(0.5) == 1.0
    assert Frechet1().survival(0) == 1
    assert Frechet1().survival(2.0) == pytest.approx(1 - math.exp(-0.5), rel=1e-12)
    assert LogHarmonic().survival(math.e) == pytest.approx(1 / math.e, rel=1e-12)
    assert Trivial().survival(0) == 0


@pytest.mark.parametrize(
    "dist, finite",
    [
        (Pareto(2.0, 1.0), True),
        (Pareto(1.0, 1.0), False),
        (DiscretePareto(), False),
        (StPetersburg(), False),
        (Frechet1(), False),
        (LogHarmonic(), False),
        (Trivial(), True),
    ],
)
def test_mean_is_finite(dist, finite):
    assert dist.mean_is_finite() is finite


def test_quantile_inverts_survival():
    for d in (Pareto(0.5, 2.0), Frechet1(), LogHarmonic()):
        for u in (0.7, 0.9, 0.999):
            assert float(d.survival(d.quantile(u))) == pytest.approx(1 - u, rel=1e-9)
    # survival is 1/e at the support minimum e: an atom of mass 1 - 1/e there
    assert LogHarmonic().quantile(0.1) == pytest.approx(math.e)


def test_shift_by_one_floor_pareto():
    y = apply_transform(DiscretePareto(), ConvexTransform.shift_by(1))
    for k in range(0, 80):
        x = F(k, 4)
        want = F(1, math.floor(x) + 1) if x >= 1 else 1
        assert y.survival(x) == want


def test_identity_transform_returns_base():
    p = Pareto(1.0, 1.0)
    assert apply_transform(p, ConvexTransform.identity()) is p


def test_exp_transform_survival():
    y = apply_transform(Pareto(1.0, 1.0), ConvexTransform.exp())
    assert float(y.survival(math.e**2 - 1)) == pytest.approx(0.5, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(1.0, 50.0))
def test_transform_consistency(x):
    base = Pareto(0.8, 1.0)
    for g in (ConvexTransform.exp(), ConvexTransform.affine(3, 1), ConvexTransform.piecewise([(0, 0), (2, 1), (4, 5)])):
        y = apply_transform(base, g)
        assert float(y.survival(float(g(x)))) == pytest.approx(base.survival(x), rel=1e-9, abs=1e-12)


def test_piecewise_plateau_uses_right_continuous_inverse():
    g = ConvexTransform.piecewise([(0, 0), (1, 0), (2, 1)])
    y = apply_transform(DiscretePareto(), g)
    # g maps [0, 1] to 0, so P(g(X) > 0) = P(X > 1)
    assert y.survival(0) == DiscretePareto().survival(1)


@pytest.mark.parametrize(
    "points",
    [
        [(0, 0), (1, 2), (2, 3)],  # concave
        [(0, 1), (1, 0)],  # decreasing
        [(0, 0)],
        [(1, 0), (0, 1)],
    ],
)
def test_piecewise_rejects_bad_data(points):
    with pytest.raises(ValueError):
        ConvexTransform.piecewise(points)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        Pareto(0.0, 1.0)
    with pytest.raises(ValueError):
        Pareto(1.0, -1.0)
    with pytest.raises(ValueError):
        ConvexTransform.affine(-1)
    with pytest.raises(ValueError):
        apply_transform(Pareto(1.0), ConvexTransform.shift_by(1), require_anchored=True)


def test_lattice_of_affine_transform():
    y = apply_transform(DiscretePareto(), ConvexTransform.affine(F(1, 2), F(-1, 3)))
    assert y.lattice_exact
    assert y.lattice() == (F(1, 2), F(-1, 3))
    assert not isinstance(apply_transform(Pareto(1.0), ConvexTransform.exp()), DiscretePareto)


def test_from_spec():
    d = from_spec({"kind": "pareto", "params": {"alpha": 0.5, "rho": 2}})
    assert d == Pareto(0.5, 2.0)
    t = from_spec({"kind": "discrete_pareto", "transform": {"kind": "shift", "a": -1}})
    assert isinstance(t, Transformed) and t.survival(-1) == F(1, 2)
    with pytest.raises(ValueError):
        from_spec({"kind": "cauchy"})
    with pytest.raises(ValueError):
        from_spec({"kind": "st-petersburg", "params": {"alpha": 1}})
    with pytest.raises(ValueError):
        from_spec({"kind": "pareto", "transform": {"kind": "log"}})


@pytest.mark.parametrize("name", NAMES)
def test_to_dict_roundtrip(name):
    d = CATALOG[name]
    assert from_spec(d.to_dict()) == d
