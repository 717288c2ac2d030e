from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest

from corpus import CATALOG
from onebasket.dist import DiscretePareto, LogHarmonic, Pareto, StPetersburg, Trivial
from onebasket.subscale import (
    ScalingFactor,
    Status,
    check_completely_subscalable,
    check_pointwise,
    check_theta_subscalable,
    discrete_pareto_A_membership,
    infinite_mean_witness,
    r_region,
    st_petersburg_B_membership,
    t_threshold,
    theta_power_closure_check,
)

HORIZON = 10**4


def _rational_thetas(count: int, seed: int = 11) -> list[F]:
    rng = np.random.default_rng(seed)
    out: set[F] = set()
    while len(out) < count:
        b = int(rng.integers(2, 41))
        a = int(rng.integers(1, b))
        out.add(F(a, b))
    return sorted(out)


THETAS_50 = _rational_thetas(50)
THETAS_20 = [float(t) for t in _rational_thetas(20, seed=5)]


def _dp_scan(theta: F, horizon: int = HORIZON) -> bool:
    """Brute-force breakpoint scan for the discrete Pareto.

    Every breakpoint is m/b with b the denominator of theta, and survival is
    1/(floor(x) + 2) on x >= 0, so the inequality at x = m/b reads
    a * (m // a + 2) <= b * (m // b + 2).
    """
    a, b = theta.numerator, theta.denominator
    m = np.arange(0, horizon * b + 1, dtype=np.int64)
    m = m[(m % a == 0) | (m % b == 0)]
    return bool(np.all(a * (m // a + 2) <= b * (m // b + 2)))


def _stp_survival(x: F) -> F:
    if x < 2:
        return F(1)
    return F(1, 2 ** (math.floor(x).bit_length() - 1))


def _stp_scan(theta: F, horizon: int = HORIZON) -> bool:
    points = {F(0)}
    k = 0
    while 2**k <= horizon:
        points |= {F(2**k), theta * 2**k}
        k += 1
    return all(theta * _stp_survival(x) <= _stp_survival(x / theta) for x in points)


@pytest.mark.parametrize("theta", THETAS_50, ids=str)
def test_set_A_against_breakpoint_scan(theta):
    want = _dp_scan(theta)
    assert discrete_pareto_A_membership(theta) is want
    v = check_theta_subscalable(DiscretePareto(), theta)
    assert v.certified is want
    if not want:
        assert not check_pointwise(DiscretePareto(), theta, v.witness_x)


@pytest.mark.parametrize("theta", THETAS_50, ids=str)
def test_set_B_against_breakpoint_scan(theta):
    want = _stp_scan(theta)
    assert st_petersburg_B_membership(theta) is want
    v = check_theta_subscalable(StPetersburg(), theta)
    assert v.certified is want
    if not want:
        assert not check_pointwise(StPetersburg(), theta, v.witness_x)


def test_set_A_closed_form():
    for k in range(1, 30):
        assert discrete_pareto_A_membership(F(k + 1, 2 * k + 1))
        assert discrete_pareto_A_membership(F(1, k + 1))
    assert not discrete_pareto_A_membership(F(5, 8))


@pytest.mark.parametrize("name", sorted(CATALOG))
@pytest.mark.parametrize("theta", THETAS_20)
def test_pointwise_at_zero_and_positive_threshold(name, theta):
    d = CATALOG[name]
    assert check_pointwise(d, theta, 0)
    assert float(t_threshold(d, theta)) > 0


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_refutations_self_verify(name):
    d = CATALOG[name]
    for theta in ["1/2", "2/3", "3/4", "9/10", 0.3, 2**-0.5]:
        v = check_theta_subscalable(d, theta)
        if v.refuted:
            assert not check_pointwise(d, ScalingFactor.of(theta).exact or float(theta), v.witness_x)


COMPLETE = sorted(k for k, d in CATALOG.items() if check_completely_subscalable(d).certified)


def test_complete_catalog_members():
    assert COMPLETE == ["frechet1", "pareto-0.5", "pareto-0.8-exp", "pareto-1", "pareto-1-rho3", "trivial"]


@pytest.mark.parametrize("name", COMPLETE)
def test_complete_implies_theta(name):
    d = CATALOG[name]
    for theta in THETAS_20:
        assert not check_theta_subscalable(d, theta).refuted


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_power_closure(name):
    d = CATALOG[name]
    for theta in ["1/2", "1/3", "2/3", "1/4", "0.3"]:
        if check_theta_subscalable(d, theta).certified:
            assert not any(v.refuted for v in theta_power_closure_check(d, theta, 5))


def test_power_closure_needs_certified_base():
    with pytest.raises(ValueError):
        theta_power_closure_check(DiscretePareto(), "3/4", 3)
    with pytest.raises(ValueError):
        theta_power_closure_check(DiscretePareto(), "1/2", 1)


def test_analytic_certificates():
    assert check_theta_subscalable(Pareto(0.5, 1.0), 0.9).certificate == "pareto-alpha-le-1"
    assert check_theta_subscalable(Trivial(), 0.5).certified
    v = check_theta_subscalable(Pareto(2.0, 1.0), "1/2")
    assert v.refuted and not check_pointwise(Pareto(2.0, 1.0), 0.5, v.witness_x)


def test_irrational_theta_discrete_pareto():
    v = check_theta_subscalable(DiscretePareto(), 2**-0.5)
    assert v.refuted
    assert not check_pointwise(DiscretePareto(), 2**-0.5, v.witness_x)


def test_st_petersburg_irrational_witness():
    v = check_theta_subscalable(StPetersburg(), 0.7071067811865476)
    assert abs(float(v.witness_x) - math.sqrt(2)) <= 1e-9


def test_log_harmonic_refuted():
    v = check_theta_subscalable(LogHarmonic(), "1/2")
    assert v.refuted
    assert not check_pointwise(LogHarmonic(), 0.5, v.witness_x)


def test_complete_subscalability():
    assert check_completely_subscalable(Pareto(1.0, 1.0)).certified
    v = check_completely_subscalable(DiscretePareto())
    x1, x2 = v.witness_pair
    assert v.refuted and x1 < 1 <= x2
    assert check_completely_subscalable(Pareto(2.0, 1.0)).refuted
    assert check_completely_subscalable(LogHarmonic()).refuted
    with pytest.raises(ValueError):
        check_completely_subscalable(Pareto(2.0, 1.0), grid=[])


def test_thresholds():
    t = t_threshold(DiscretePareto(), "9/10")
    assert t.value == F(9, 10) and not t.beyond_horizon
    t = t_threshold(Pareto(1.0, 1.0), 0.5, horizon=1e6)
    assert t.beyond_horizon
    # theta F(x) <= F(2x) fails from x = e/2 on: below it the right side is 1
    t = t_threshold(LogHarmonic(), "1/2")
    assert float(t) == pytest.approx(math.e / 2, abs=1e-9)
    assert check_pointwise(LogHarmonic(), 0.5, math.e / 2 - 1e-6)
    assert not check_pointwise(LogHarmonic(), 0.5, math.e / 2 + 1e-6)


def test_regions():
    r = r_region(DiscretePareto(), "1/2", 100)
    assert r.complete and r.intervals == [(0, 100)]
    r = r_region(DiscretePareto(), "9/10", 10)
    assert not r.contains(F(9, 10)) and r.contains(F(1, 2))
    r = r_region(Pareto(2.0, 1.0), "1/2", 1e-3)
    assert r.complete
    with pytest.raises(ValueError):
        r_region(DiscretePareto(), "1/2", 0)


def test_infinite_mean_witness():
    ev = infinite_mean_witness(Pareto(1.0, 1.0), "1/2", 1)
    assert ev.holds and float(ev.c) == pytest.approx(1)
    ev = infinite_mean_witness(StPetersburg(), "1/2", 2, k_max=8)
    assert ev.holds and ev.c == 1
    assert all(h == 1 for _, h in ev.points)
    with pytest.raises(ValueError):
        infinite_mean_witness(Trivial(), "1/2", 1)


def test_scaling_factor():
    assert ScalingFactor.of("3/4").exact == F(3, 4)
    s = ScalingFactor.of(0.3)
    assert s.approximate and s.exact == F(3, 10)
    assert ScalingFactor.irrational(2**-0.5).exact is None
    for bad in (0, 1, "5/4", -0.5):
        with pytest.raises(ValueError):
            ScalingFactor.of(bad)


def test_verdict_json():
    d = check_theta_subscalable(DiscretePareto(), "3/4").to_dict()
    assert d["status"] == Status.REFUTED.value
    assert set(d) >= {"status", "witness_x", "certificate", "scan_horizon"}
