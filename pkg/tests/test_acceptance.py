"""One test per acceptance criterion; each prints a PASS/FAIL line."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction as F

import numpy as np

from corpus import CATALOG, LATTICE, PORTFOLIOS
from onebasket.convolve import brute_force_survival, survival_bounds, weighted_sum_pmf
from onebasket.dist import ConvexTransform, DiscretePareto, Pareto, StPetersburg, apply_transform
from onebasket.montecarlo import ConvexTestFunction, estimate_diversified_survival
from onebasket.portfolio import PortfolioSpec, WeightVector, check_onebasket_conditions
from onebasket.repro import mixed_pareto_lower_bound, mixed_pareto_portfolio
from onebasket.subscale import (
    check_completely_subscalable,
    check_pointwise,
    check_theta_subscalable,
    theta_power_closure_check,
)
from onebasket.verify import (
    DominanceStatus,
    convex_order_check,
    local_dominance_check,
    partition_property_check,
    random_partition_fixture,
    verify_dominance_exact,
    verify_dominance_mc,
)

SEED = 20240917


def test_criterion_01_discrete_pareto_counterexample(criterion):
    c = criterion("1", "discrete Pareto (9/10, 1/10) refuted at x = 9/10", limit=10)
    port = PortfolioSpec.iid(DiscretePareto(), ["9/10", "1/10"])
    v = verify_dominance_exact(port, truncate_at=10**4)
    x = F(9, 10)
    cell = v.cell_at(x)
    checks = {
        "refuted at 9/10": v.status is DominanceStatus.REFUTED and v.refutation.x == x,
        "concentrated = 1/2": cell.concentrated == F(1, 2),
        "brackets 61/132": cell.lower <= F(61, 132) <= cell.upper,
        "width <= 2e-4": cell.upper - cell.lower <= F(2, 10**4),
        "gap >= 5/132 - 2e-4": v.refutation.gap >= F(5, 132) - F(2, 10**4),
    }
    bad = [k for k, ok in checks.items() if not ok]
    c.finish(not bad, f"gap={float(v.refutation.gap):.6f} failed={bad}")


def test_criterion_02_set_A(criterion):
    c = criterion("2", "discrete Pareto scaling set", limit=1)
    d = DiscretePareto()
    inside = ["1/3", "1/2", "2/3", "3/5", "4/7"]
    outside = ["11/20", "3/4", "9/10"]
    ok = all(check_theta_subscalable(d, t).certified for t in inside)
    wit = {}
    for t in outside:
        v = check_theta_subscalable(d, t)
        # the witness must violate the inequality when re-evaluated
        wit[t] = v.witness_x
        ok = ok and v.refuted and not check_pointwise(d, F(t), v.witness_x)
    c.finish(ok, "witnesses " + ", ".join(f"{t}->{w}" for t, w in wit.items()))


def test_criterion_03_set_B(criterion):
    c = criterion("3", "St. Petersburg scaling set", limit=1)
    s = StPetersburg()
    ok = all(check_theta_subscalable(s, t).certified for t in ("1/2", "1/4", "1/8"))
    v3 = check_theta_subscalable(s, "1/3")
    ok = ok and v3.refuted and not check_pointwise(s, F(1, 3), v3.witness_x)
    vr = check_theta_subscalable(s, 0.7071067811865476)
    ok = ok and vr.refuted and abs(float(vr.witness_x) - math.sqrt(2)) <= 1e-9
    ok = ok and not check_pointwise(s, 0.7071067811865476, vr.witness_x)
    c.finish(ok, f"witnesses 1/3->{v3.witness_x}, 2^-1/2->{float(vr.witness_x)!r}")


def test_criterion_04_discrete_pareto_averages(criterion):
    c = criterion("4", "X <=st average of n iid discrete Pareto, n = 2..5 on [0, 40]", limit=120)
    ok, details = True, []
    for n in range(2, 6):
        port = PortfolioSpec.iid(DiscretePareto(), WeightVector.equal(n))
        v = verify_dominance_exact(port, max_x=40, max_width=F(1, 10**4), truncate_at=1024)
        width = max(cell.upper - cell.lower for cell in v.cells)
        ok = ok and v.status is DominanceStatus.CERTIFIED_ON_GRID and not v.refuted_cells
        ok = ok and width <= F(1, 10**4) and v.grid[-1] == 40
        details.append(f"n={n}:{len(v.grid)}pts,T={v.truncate_at}")
    c.finish(ok, " ".join(details))


def test_criterion_05_st_petersburg_averages(criterion):
    c = criterion("5", "X <=st average of n iid St. Petersburg, n in {2, 4} on [0, 1024]", limit=120)
    ok, details = True, []
    for n in (2, 4):
        port = PortfolioSpec.iid(StPetersburg(), WeightVector.equal(n))
        v = verify_dominance_exact(port, max_x=2**10, max_width=F(1, 10**3), truncate_at=1024)
        width = max(cell.upper - cell.lower for cell in v.cells)
        ok = ok and v.status is DominanceStatus.CERTIFIED_ON_GRID and width <= F(1, 10**3)
        details.append(f"n={n}:{len(v.grid)}pts,T={v.truncate_at}")
    c.finish(ok, " ".join(details))


def test_criterion_06_mixed_pareto_lower_bound(criterion):
    c = criterion("6", "mixed Pareto MC lower bound above the explicit bound", limit=60)
    port = mixed_pareto_portfolio()
    xs = np.geomspace(1.0, 1e3, 16)
    ests = estimate_diversified_survival(port, xs, 10**6, SEED)
    margins = [e.low - mixed_pareto_lower_bound(float(x)) for x, e in zip(xs, ests)]
    c.finish(min(margins) >= -1e-3 and len(margins) == 16, f"min margin {min(margins):.4g}")


def test_criterion_07_condition_implies_conclusion(criterion):
    c = criterion("7", "all_satisfied portfolios never refuted", limit=None)
    assert len(PORTFOLIOS) >= 12
    satisfied, violations = 0, []
    for name, port in PORTFOLIOS.items():
        rep = check_onebasket_conditions(port)
        if not rep.all_satisfied:
            continue
        assert all(e.verdict.certificate for e in rep.entries), name
        satisfied += 1
        verdicts = [verify_dominance_mc(port, samples=2 * 10**5, seed=SEED)]
        if port.weights.exact is not None and all(r.lattice_exact for r in port.risks):
            verdicts.append(verify_dominance_exact(port, max_x=40))
        for v in verdicts:
            if v.status is DominanceStatus.REFUTED:
                violations.append(f"{name}/{v.mode}")
    c.finish(not violations and satisfied >= 8, f"{satisfied}/{len(PORTFOLIOS)} satisfied, refuted: {violations}")


def test_criterion_08_local_dominance(criterion):
    c = criterion("8", "no refutation below t(theta)", limit=None)
    ok, details = True, []
    for name in ("dp-9/10-1/10", "pareto-2-equal"):
        ld = local_dominance_check(PORTFOLIOS[name], samples=10**6, seed=SEED)
        t = float(ld.threshold)
        below = [float(cell.x) for cell in ld.full.refuted_cells if float(cell.x) < t]
        ok = ok and t > 0 and ld.holds and not below
        details.append(f"{name}: t={t:.6g}, global={ld.full.status.value}")
    c.finish(ok, "; ".join(details))


def _convex(c_fn, criterion, label):
    port = PortfolioSpec.iid(Pareto(2.0, 1.0), WeightVector.equal(2))
    (r,) = convex_order_check(port, [c_fn], 10**6, SEED)
    return r.gap


def test_criterion_09a_convex_order_identity(criterion):
    c = criterion("9.1", "convex order, c = identity: difference contains 0", limit=60)
    g = _convex(ConvexTestFunction.identity(), criterion, "identity")
    d = g.difference
    c.finish(d.low <= 0 <= d.high, f"[{d.low:.4g}, {d.high:.4g}]")


def test_criterion_09b_convex_order_power(criterion):
    c = criterion("9.2", "convex order, c = x^2: upper bound <= 1e-3 * scale", limit=60)
    g = _convex(ConvexTestFunction.power(2), criterion, "power")
    d = g.difference
    c.finish(d.high <= 1e-3 * g.scale, f"[{d.low:.4g}, {d.high:.4g}] scale {g.scale:g}")


def test_criterion_09c_convex_order_hinge(criterion):
    c = criterion("9.3", "convex order, c = (x-1)+: upper bound <= 1e-3 * scale", limit=60)
    g = _convex(ConvexTestFunction.hinge(1), criterion, "hinge")
    d = g.difference
    c.finish(d.high <= 1e-3 * g.scale, f"[{d.low:.4g}, {d.high:.4g}] scale {g.scale:g}")


def test_criterion_10_partition(criterion):
    c = criterion("10", "threshold events partition the sample space", limit=None)
    rng = np.random.default_rng(SEED)
    fixtures = [random_partition_fixture(rng, n) for n in (2, 3) for _ in range(15)]
    assert all(len(s) <= 5 for f in fixtures for s in f.support)
    ok = all(partition_property_check(f) for f in fixtures)
    outcomes = sum(math.prod(len(s) for s in f.support) for f in fixtures)
    c.finish(ok and len(fixtures) >= 20, f"{len(fixtures)} fixtures, {outcomes} outcomes")


ORACLE_RISKS = [LATTICE[k] for k in ("discrete-pareto", "st-petersburg", "dp-shift-1", "dp-double")]
ORACLE_WEIGHTS = [
    [F(1, 2)] * 2,
    [F(9, 10), F(1, 10)],
    [F(1, 3), F(2, 3)],
    [F(1, 3)] * 3,
    [F(1, 5), F(3, 10), F(1, 2)],
]


def test_criterion_11_oracle_equivalence(criterion):
    c = criterion("11", "convolution equals brute force exactly", limit=None)
    count, mismatches = 0, []
    for w in ORACLE_WEIGHTS:
        for combo in itertools.combinations_with_replacement(range(len(ORACLE_RISKS)), len(w)):
            port = PortfolioSpec(tuple(ORACLE_RISKS[i] for i in combo), w)
            for T in (37, 200):
                for x in (F(0), F(9, 10), F(3), F(22, 3), F(17)):
                    b = brute_force_survival(port, x, T)
                    e = survival_bounds(weighted_sum_pmf(port.risks, port.weights, T, max_x=x), x)
                    count += 1
                    if (b.lower, b.upper) != (e.lower, e.upper):
                        mismatches.append((combo, w, T, x))
    c.finish(count >= 30 and not mismatches, f"{count} fixtures, {len(mismatches)} mismatches")


def test_criterion_12_closure_and_continuity(criterion):
    c = criterion("12", "theta^k closure and continuity over the catalog", limit=None)
    thetas = ["1/2", "1/3", "2/3", "1/4", "3/5", "0.3", 2**-0.5]
    closures = 0
    ok = True
    for name, d in CATALOG.items():
        for t in thetas:
            if not check_theta_subscalable(d, t).certified:
                continue
            closures += 1
            ok = ok and not any(v.refuted for v in theta_power_closure_check(d, t, 5))
    for name, d in LATTICE.items():
        v = check_completely_subscalable(d)
        jumps = [x for x, _ in d.atoms(10) if x > 0]
        if jumps:
            ok = ok and v.refuted
        else:
            ok = ok and not v.refuted
    v = check_completely_subscalable(DiscretePareto())
    x1, x2 = v.witness_pair
    straddle = math.floor(x1) < math.floor(x2) and x1 < x2
    shifted = check_completely_subscalable(apply_transform(DiscretePareto(), ConvexTransform.shift_by(1)))
    c.finish(ok and v.refuted and straddle and shifted.refuted, f"{closures} closure chains, DP pair {x1}..{x2}")
