"""Registry of self-checking reproduction cases."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from .convolve import brute_force_survival, concentrated_survival, survival_bounds, weighted_sum_pmf
from .dist import ConvexTransform, DiscretePareto, Pareto, StPetersburg, apply_transform
from .montecarlo import DEFAULT_SEED, ConvexTestFunction, estimate_diversified_survival
from .portfolio import PortfolioSpec, WeightVector, check_onebasket_conditions
from .subscale import check_theta_subscalable, discrete_pareto_A_membership, st_petersburg_B_membership
from .verify import (
    DominanceStatus,
    PartitionFixture,
    convex_order_check,
    hunt_counterexample,
    iid_transform_dominance,
    local_dominance_check,
    partition_property_check,
    random_partition_fixture,
    reinsurance_check,
    reproduce_inductions,
    verify_dominance_exact,
    verify_dominance_mc,
)


@dataclass
class CaseResult:
    case_id: str
    checks: list[tuple[str, bool, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(ok for _, ok, _ in self.checks)

    def check(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append((name, bool(ok), detail))

    def to_dict(self) -> dict:
        return {
            "id": self.case_id,
            "passed": self.passed,
            "checks": [{"name": n, "ok": ok, "detail": d} for n, ok, d in self.checks],
        }


@dataclass(frozen=True)
class ReproCase:
    case_id: str
    description: str
    location: str
    expected: str
    run: Callable[..., CaseResult]


MIXED_PARETO = dict(alpha=(0.5, 1.0, 0.8), rho=(1.0, 3.0, 2.0), theta=("1/5", "3/10", "1/2"))


def mixed_pareto_portfolio() -> PortfolioSpec:
    risks = tuple(Pareto(a, r) for a, r in zip(MIXED_PARETO["alpha"], MIXED_PARETO["rho"]))
    return PortfolioSpec(risks, WeightVector.of(list(MIXED_PARETO["theta"])))


def mixed_pareto_lower_bound(x: float) -> float:
    """sum gamma_i(x) x^-alpha_i with gamma_i(x) = 1{x >= rho_i} theta_i rho_i^alpha_i."""
    total = 0.0
    for a, r, t in zip(MIXED_PARETO["alpha"], MIXED_PARETO["rho"], MIXED_PARETO["theta"]):
        if x >= r:
            total += float(Fraction(t)) * r**a * x**-a
    return total


def _noniid_pareto(samples: int = 10**6, seed: int = DEFAULT_SEED, **_) -> CaseResult:
    res = CaseResult("ex-noniid-pareto")
    port = mixed_pareto_portfolio()
    rep = check_onebasket_conditions(port)
    res.check("conditions all satisfied", rep.all_satisfied, f"{len(rep.entries)} entries")
    xs = np.geomspace(1.0, 1e3, 16)
    ests = estimate_diversified_survival(port, xs, samples, seed)
    worst = min(e.low - mixed_pareto_lower_bound(x) for x, e in zip(xs, ests))
    res.check("MC lower bound >= explicit lower bound - 1e-3", worst >= -1e-3, f"min margin {worst:.4g}")
    v = verify_dominance_mc(port, grid=xs, samples=samples, seed=seed)
    res.check("Monte Carlo verdict not refuted", v.status is not DominanceStatus.REFUTED, v.status.value)
    return res


def _discrete_pareto(**_) -> CaseResult:
    res = CaseResult("ex-discrete-pareto")
    d = DiscretePareto()
    port = PortfolioSpec.iid(d, ["9/10", "1/10"])
    v = verify_dominance_exact(port, truncate_at=10**4)
    x = Fraction(9, 10)
    ok = v.refutation is not None and v.refutation.x == x
    res.check("refuted at x = 9/10", ok, str(v.refutation.to_dict() if v.refutation else None))
    cell = v.cell_at(x)
    res.check("concentrated survival is exactly 1/2", cell.concentrated == Fraction(1, 2), str(cell.concentrated))
    res.check(
        "diversified survival brackets 61/132",
        cell.lower <= Fraction(61, 132) <= cell.upper and cell.upper - cell.lower <= Fraction(2, 10**4),
        f"[{float(cell.lower):.6f}, {float(cell.upper):.6f}]",
    )
    b = brute_force_survival(port, x, 500)
    res.check("brute force agrees", b.lower <= Fraction(61, 132) <= b.upper, f"upper {b.upper}")
    for n in (2, 3):
        rep = check_onebasket_conditions(PortfolioSpec.iid(d, WeightVector.equal(n)))
        res.check(f"n={n} equal weights satisfies the conditions", rep.all_satisfied)
    rep = check_onebasket_conditions(PortfolioSpec.iid(d, WeightVector.equal(4)))
    f = rep.failing_entry
    res.check("n=4 fails at subset weight 3/4", f is not None and f.theta_mu == Fraction(3, 4), str(f and f.theta_mu))
    inside = ["1/3", "1/2", "2/3", "3/5", "4/7"]
    outside = ["11/20", "3/4", "9/10"]
    res.check(
        "membership in the discrete Pareto scaling set",
        all(discrete_pareto_A_membership(t) for t in inside) and not any(discrete_pareto_A_membership(t) for t in outside),
    )
    return res


def _stpetersburg(**_) -> CaseResult:
    res = CaseResult("ex-stpetersburg")
    s = StPetersburg()
    res.check(
        "dyadic scaling factors are exactly the certified ones",
        all(check_theta_subscalable(s, t).certified for t in ("1/2", "1/4", "1/8"))
        and all(check_theta_subscalable(s, t).refuted for t in ("1/3", 0.7071067811865476)),
    )
    v = check_theta_subscalable(s, 0.7071067811865476)
    res.check("witness near sqrt(2)", abs(float(v.witness_x) - math.sqrt(2)) < 1e-9, str(float(v.witness_x)))
    for n in (2, 4):
        port = PortfolioSpec.iid(s, WeightVector.equal(n))
        vv = verify_dominance_exact(port, max_x=2**10, max_width=Fraction(1, 1000), truncate_at=1024)
        res.check(f"n={n} certified on [0, 1024]", vv.status is DominanceStatus.CERTIFIED_ON_GRID, vv.status.value)
    port = PortfolioSpec.iid(s, WeightVector.equal(2))
    b = survival_bounds(weighted_sum_pmf(port.risks, port.weights, 2**20, max_x=4), 2)
    res.check("n=2 at x=2: 3/4 against 1/2", b.exact and b.upper == Fraction(3, 4) and concentrated_survival(port, 2) == Fraction(1, 2))
    res.check("powers of 1/2 stay dyadic", all(st_petersburg_B_membership(Fraction(1, 2) ** k) for k in range(1, 6)))
    return res


def _negative_shift(**_) -> CaseResult:
    res = CaseResult("ex-negative-shift")
    d = DiscretePareto()
    for a in (Fraction(-1), Fraction(-1, 2), Fraction(1)):
        for n in (2, 3):
            v = iid_transform_dominance(d, WeightVector.equal(n), ConvexTransform.shift_by(a), max_x=30)
            res.check(
                f"shift {a}, n={n} certified on grid from {float(v.grid[0])}",
                v.status is DominanceStatus.CERTIFIED_ON_GRID,
                v.status.value,
            )
    y = apply_transform(d, ConvexTransform.shift_by(1))
    p = Pareto(1.0, 1.0)
    xs = [Fraction(k, 4) for k in range(0, 200)]
    same = all(y.survival(x) == (Fraction(1, math.floor(x) + 1) if x >= 1 else 1) for x in xs)
    res.check("shift by 1 has survival 1/(floor(x)+1)", same)
    # floor(Z) > x iff Z >= floor(x) + 1, and Z has no atoms
    floors = all(abs(float(y.survival(x)) - p.survival(math.floor(x) + 1)) < 1e-12 for x in xs if x >= 1)
    res.check("equals the law of the floor of a Pareto(1, 1) variable", floors)
    return res


def _induction(nmax: int = 5, **_) -> CaseResult:
    res = CaseResult("prop-induction")
    rep = reproduce_inductions(n_max=nmax)
    for name, n, v in rep.rows:
        res.check(f"{name} n={n}", v.status is DominanceStatus.CERTIFIED_ON_GRID, f"{v.status.value}, truncate_at={v.truncate_at}")
    for name, n, ok in rep.closure:
        res.check(f"{name} n={n} splits into floor(n/2) and the rest", ok)
    return res


def _reinsurance(**_) -> CaseResult:
    res = CaseResult("reinsurance")
    for dist, theta, want in (
        (Pareto(0.5, 1.0), "3/10", (True, True)),
        (DiscretePareto(), "2/5", (True, True)),
        (DiscretePareto(), "1/4", (True, False)),
    ):
        ced, ret = reinsurance_check(dist, theta)
        got = (ced.certified, ret.certified)
        res.check(f"{dist} theta={theta}", got == want and (ret.certified or ret.refuted), f"{ced.status.value}/{ret.status.value}")
    return res


def _convex_order(samples: int = 10**6, seed: int = DEFAULT_SEED, **_) -> CaseResult:
    res = CaseResult("convex-order")
    port = PortfolioSpec.iid(Pareto(2.0, 1.0), WeightVector.equal(2))
    cs = [
        ConvexTestFunction.identity(),
        ConvexTestFunction.negated_identity(),
        ConvexTestFunction.power(2),
        ConvexTestFunction.hinge(1),
    ]
    for r in convex_order_check(port, cs, samples, seed):
        d = r.gap.difference
        if r.gap.c.form.value in ("identity", "negated-identity"):
            ok = d.low <= 0 <= d.high
        else:
            ok = d.high <= 1e-3 * r.gap.scale
        res.check(str(r.gap.c), ok and r.consistent, f"difference [{d.low:.4g}, {d.high:.4g}], scale {r.gap.scale:g}")
    try:
        convex_order_check(PortfolioSpec.iid(Pareto(0.5, 1.0), WeightVector.equal(2)), [ConvexTestFunction.power(2)], 10**4)
        res.check("infinite mean with power(2) refused", False)
    except ValueError:
        res.check("infinite mean with power(2) refused", True)
    return res


def _partition(seed: int = DEFAULT_SEED, **_) -> CaseResult:
    res = CaseResult("partition")
    f1 = PartitionFixture(
        2, {frozenset({0}): 2, frozenset({1}): 2, frozenset({0, 1}): 1}, ((0, 1, 3), (0, 1, 3))
    )
    res.check("two risks, support {0,1,3}^2", partition_property_check(f1))
    subs = [frozenset(s) for s in ({0}, {1}, {2}, {0, 1}, {0, 2}, {1, 2}, {0, 1, 2})]
    f2 = PartitionFixture(3, {s: 3.0 for s in subs}, ((0, 5),) * 3)
    res.check("three risks, equal thresholds, support {0,5}^3", partition_property_check(f2))
    rng = np.random.default_rng(seed)
    ok = all(partition_property_check(random_partition_fixture(rng, n)) for n in (2, 3) for _ in range(12))
    res.check("24 random monotone fixtures", ok)
    bad = PartitionFixture(2, {frozenset({0}): 0, frozenset({1}): 2, frozenset({0, 1}): 1}, ((0, 1),) * 2)
    try:
        partition_property_check(bad)
        res.check("hypothesis violation rejected", False)
    except ValueError:
        res.check("hypothesis violation rejected", True)
    return res


def _local_threshold(samples: int = 10**6, seed: int = DEFAULT_SEED, **_) -> CaseResult:
    res = CaseResult("local-threshold")
    for port in (
        PortfolioSpec.iid(DiscretePareto(), ["9/10", "1/10"]),
        PortfolioSpec.iid(Pareto(2.0, 1.0), WeightVector.equal(2)),
    ):
        ld = local_dominance_check(port, samples=samples, seed=seed)
        res.check(
            f"{port.risks[0]} no refutation below t = {float(ld.threshold):.6g}",
            ld.holds,
            f"global verdict {ld.full.status.value}",
        )
    w = hunt_counterexample(PortfolioSpec.iid(DiscretePareto(), ["9/10", "1/10"]))
    res.check("counterexample search finds 9/10", w is not None and w.x == Fraction(9, 10))
    return res


REGISTRY: dict[str, ReproCase] = {
    c.case_id: c
    for c in (
        ReproCase(
            "ex-noniid-pareto",
            "Non-identical Pareto risks with tail indices at most one",
            "worked example: alpha=(0.5,1,0.8), rho=(1,3,2), explicit survival lower bound",
            "conditions certified; MC lower bound above sum gamma_i(x) x^-alpha_i",
            _noniid_pareto,
        ),
        ReproCase(
            "ex-discrete-pareto",
            "Average of iid shifted discrete Pareto risks",
            "worked example: weights (9/10, 1/10) break dominance at x = 9/10",
            "refuted at 9/10 with 1/2 against 61/132; n=2,3 certified, n=4 fails at 3/4",
            _discrete_pareto,
        ),
        ReproCase(
            "ex-stpetersburg",
            "St. Petersburg lottery: dyadic scaling factors and averages of 2 and 4 copies",
            "dyadic scaling factors; averages of 2^k St. Petersburg copies",
            "set {2^-k} exact; n=2,4 certified on [0, 1024]",
            _stpetersburg,
        ),
        ReproCase(
            "ex-negative-shift",
            "Shifted discrete Pareto X + a, including negative support",
            "worked example on increasing convex transforms of iid averages",
            "certified on grids reaching below zero; a = 1 matches floor of Pareto(1, 1)",
            _negative_shift,
        ),
        ReproCase(
            "prop-induction",
            "X <=st average of n iid discrete Pareto copies, plus St. Petersburg n = 2, 4",
            "one risk against the average of n iid copies, split m = floor(n/2)",
            "every n certified on the grid; split blends reproduce the n-average exactly",
            _induction,
        ),
        ReproCase(
            "reinsurance",
            "Randomized versus proportional quota share for cedent and reinsurer",
            "reinsurance application: both parties need theta and 1 - theta",
            "Pareto(0.5) both; discrete Pareto 2/5 both; 1/4 only the cedent",
            _reinsurance,
        ),
        ReproCase(
            "convex-order",
            "Diversified average is smaller in convex order than the mixture",
            "diversified average against the mixture in convex order, finite means",
            "identity gap contains 0; power(2), hinge(1) gaps not above 0",
            _convex_order,
        ),
        ReproCase(
            "partition",
            "Threshold events B_mu partition the sample space",
            "threshold events B_mu built from thresholds shrinking along inclusions",
            "exactly one event per outcome on every fixture",
            _partition,
        ),
        ReproCase(
            "local-threshold",
            "Dominance always holds below the threshold t(theta)",
            "dominance on [0, t(theta)) even when it fails globally",
            "no refutation below t(theta) > 0 for two globally failing portfolios",
            _local_threshold,
        ),
    )
}


def run_case(case_id: str, **kwargs) -> CaseResult:
    if case_id not in REGISTRY:
        raise KeyError(f"unknown case {case_id!r}; registered: {', '.join(REGISTRY)}")
    return REGISTRY[case_id].run(**kwargs)
