"""Dominance verdicts: is P(sum theta_i X_i > x) >= sum theta_i P(X_i > x)?

Exact mode compares rational enclosures from the convolution engine with the
exact concentrated survival at every point of a grid. Monte Carlo mode
compares confidence intervals with it and never certifies anything.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from ._numbers import fmt, to_fraction
from .convolve import (
    BRUTE_MAX_N,
    BRUTE_MAX_T,
    LatticePMF,
    _convolve,
    brute_force_survival,
    concentrated_survival,
    survival_bounds,
    weighted_sum_pmf,
)
from .dist import ConvexTransform, DiscretePareto, RiskDistribution, StPetersburg, apply_transform
from .montecarlo import (
    DEFAULT_DELTA,
    DEFAULT_SEED,
    ConvexGap,
    ConvexTestFunction,
    estimate_convex_gap,
    estimate_diversified_survival,
)
from .portfolio import PortfolioSpec, WeightVector, check_onebasket_conditions, global_threshold
from .subscale import (
    DEFAULT_HORIZON,
    ScalingFactor,
    SubscalabilityVerdict,
    Threshold,
    check_theta_subscalable,
)

DEFAULT_TRUNCATE = 10**4
DEFAULT_MAX_X = 50
DEFAULT_SAMPLES = 10**6
DOUBLING_BUDGET = 6
MC_GRID_POINTS = 64
MC_GRID_MAX = 1e3


class DominanceStatus(Enum):
    CERTIFIED_ON_GRID = "CERTIFIED_ON_GRID"
    REFUTED = "REFUTED"
    STATISTICALLY_CONSISTENT = "STATISTICALLY_CONSISTENT"
    UNDECIDED = "UNDECIDED"

    @property
    def exit_code(self) -> int:
        if self is DominanceStatus.REFUTED:
            return 2
        if self is DominanceStatus.UNDECIDED:
            return 3
        return 0


@dataclass
class Cell:
    """One grid point: concentrated survival against the diversified enclosure."""

    x: object
    concentrated: object
    lower: object
    upper: object
    verdict: str  # certified | refuted | straddle | consistent | inconclusive
    estimate: Optional[float] = None

    def to_row(self) -> list:
        return [float(self.x), float(self.concentrated), float(self.lower), float(self.upper), self.verdict]


@dataclass
class Refutation:
    x: object
    gap: object = None  # exact: concentrated - diversified upper bound
    z: Optional[float] = None  # statistical: standardized shortfall

    def to_dict(self) -> dict:
        d = {"x": float(self.x)}
        if isinstance(self.x, Fraction):
            d["x_exact"] = fmt(self.x)
        if self.gap is not None:
            d["gap"] = float(self.gap)
            if isinstance(self.gap, Fraction):
                d["gap_exact"] = fmt(self.gap)
        if self.z is not None:
            d["z"] = self.z
        return d


@dataclass
class DominanceVerdict:
    status: DominanceStatus
    grid: list
    cells: list[Cell] = field(default_factory=list)
    refutation: Optional[Refutation] = None
    notes: list[str] = field(default_factory=list)
    mode: str = "exact"
    truncate_at: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None

    @property
    def exit_code(self) -> int:
        return self.status.exit_code

    @property
    def refuted_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.verdict == "refuted"]

    def cell_at(self, x) -> Cell:
        for c in self.cells:
            if c.x == x:
                return c
        raise KeyError(x)

    def to_dict(self) -> dict:
        d = {
            "status": self.status.value,
            "mode": self.mode,
            "grid_points": len(self.grid),
            "grid_min": float(self.grid[0]) if self.grid else None,
            "grid_max": float(self.grid[-1]) if self.grid else None,
            "refutation": None if self.refutation is None else self.refutation.to_dict(),
            "notes": self.notes,
        }
        if self.truncate_at is not None:
            d["truncate_at"] = self.truncate_at
        if self.samples is not None:
            d["samples"] = self.samples
        if self.seed is not None:
            d["seed"] = self.seed
        return d


# ---------------------------------------------------------------------------
# grids


def exact_grid(portfolio: PortfolioSpec, max_x=DEFAULT_MAX_X, min_x=None) -> list[Fraction]:
    """Every point where either survival function can jump, from min_x to max_x.

    Both functions are constant between consecutive points, so checking the
    grid checks the whole interval.
    """
    from .convolve import lattice_scale

    q = lattice_scale(portfolio.risks, portfolio.weights)
    hi = to_fraction(max_x)
    lo = to_fraction(min_x) if min_x is not None else min(
        [Fraction(0)] + [to_fraction(r.support_min) for r in portfolio.risks]
    )
    pts = {Fraction(k, q) for k in range(math.ceil(lo * q), math.floor(hi * q) + 1)}
    for r in portfolio.risks:
        pts.update(b for b in r.breakpoints(hi) if lo <= b <= hi)
    return sorted(pts)


def mc_grid(portfolio: PortfolioSpec, points: int = MC_GRID_POINTS, max_x: float = MC_GRID_MAX) -> np.ndarray:
    lo = min(float(r.support_min) for r in portfolio.risks)
    if lo > 0:
        return np.geomspace(lo, max_x, points)
    # non-positive support: a linear stretch up to 1, then log-spaced
    lin = np.linspace(lo, 1.0, points // 4, endpoint=False)
    return np.concatenate([lin, np.geomspace(1.0, max_x, points - lin.size)])


def _truncation_for_width(risks, width: Fraction, start: int) -> int:
    T = start
    while True:
        kept = Fraction(1)
        for r in risks:
            kept *= 1 - r.survival(T)
        if 1 - kept <= width:
            return T
        T *= 2


# ---------------------------------------------------------------------------
# exact verification


def _exact_cells(portfolio, grid, pmf: LatticePMF) -> list[Cell]:
    cells = []
    for x in grid:
        b = survival_bounds(pmf, x)
        conc = concentrated_survival(portfolio, x)
        low = b.upper if b.exact else b.lower
        if low >= conc:
            v = "certified"
        elif b.upper < conc:
            v = "refuted"
        else:
            v = "straddle"
        cells.append(Cell(x, conc, b.lower, b.upper, v))
    return cells


def verify_dominance_exact(
    portfolio: PortfolioSpec,
    grid: Optional[Sequence] = None,
    truncate_at: int = DEFAULT_TRUNCATE,
    max_x=DEFAULT_MAX_X,
    max_width=None,
    budget: int = DOUBLING_BUDGET,
) -> DominanceVerdict:
    """Grid-wise exact comparison.

    ``max_width`` raises ``truncate_at`` until the truncation tail is at most
    that wide; straddling cells trigger up to ``budget`` further doublings.
    """
    for r in portfolio.risks:
        if not r.lattice_exact:
            raise ValueError(f"exact mode needs lattice-exact risks; {r} is not (use --mode mc)")
    if portfolio.weights.exact is None:
        raise ValueError("exact mode needs rational weights")
    if grid is None:
        grid = exact_grid(portfolio, max_x)
    else:
        grid = sorted(to_fraction(x) for x in grid)
    if not grid:
        raise ValueError("empty grid")
    notes = []
    T = int(truncate_at)
    if max_width is not None:
        T = _truncation_for_width(portfolio.risks, to_fraction(max_width), T)
    top = max(grid[-1], Fraction(0))
    for attempt in range(budget + 1):
        pmf = weighted_sum_pmf(portfolio.risks, portfolio.weights, T, max_x=top)
        cells = _exact_cells(portfolio, grid, pmf)
        if not any(c.verdict == "straddle" for c in cells) or attempt == budget:
            break
        notes.append(f"straddling cells at truncate_at={T}; doubling")
        T *= 2
    notes.append(f"tail mass {float(pmf.tail_mass):.3g} at truncate_at={T}")
    notes.append("certification is relative to the grid")
    refuted = [c for c in cells if c.verdict == "refuted"]
    if refuted:
        c = refuted[0]
        return DominanceVerdict(
            DominanceStatus.REFUTED, grid, cells, Refutation(c.x, gap=c.concentrated - c.upper), notes, "exact", T
        )
    if all(c.verdict == "certified" for c in cells):
        return DominanceVerdict(DominanceStatus.CERTIFIED_ON_GRID, grid, cells, None, notes, "exact", T)
    return DominanceVerdict(DominanceStatus.UNDECIDED, grid, cells, None, notes, "exact", T)


# ---------------------------------------------------------------------------
# Monte Carlo verification


def verify_dominance_mc(
    portfolio: PortfolioSpec,
    grid: Optional[Sequence[float]] = None,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    delta: float = DEFAULT_DELTA,
    workers: Optional[int] = None,
) -> DominanceVerdict:
    """Statistical comparison; STATISTICALLY_CONSISTENT at best.

    A cell is refuted when the upper confidence bound lies below the
    concentrated survival, consistent when the lower bound or the point
    estimate reaches it, and inconclusive otherwise.
    """
    if samples < 10**4:
        raise ValueError("Monte Carlo verification needs at least 10^4 samples")
    xs = mc_grid(portfolio) if grid is None else np.asarray(sorted(float(x) for x in grid))
    ests = estimate_diversified_survival(portfolio, xs, samples, seed, delta, workers=workers)
    cells = []
    refutation = None
    for x, e in zip(xs, ests):
        conc = float(concentrated_survival(portfolio, float(x)))
        if e.high < conc:
            v = "refuted"
            if refutation is None:
                sd = math.sqrt(max(e.point_estimate * (1 - e.point_estimate), 1.0 / samples) / samples)
                refutation = Refutation(float(x), gap=conc - e.high, z=(conc - e.point_estimate) / sd)
        elif e.low >= conc or e.point_estimate >= conc:
            v = "consistent"
        else:
            v = "inconclusive"
        cells.append(Cell(float(x), conc, e.low, e.high, v, e.point_estimate))
    notes = [f"Hoeffding intervals at confidence 1-{delta:g}"]
    if refutation is not None:
        status = DominanceStatus.REFUTED
    elif all(c.verdict == "consistent" for c in cells):
        status = DominanceStatus.STATISTICALLY_CONSISTENT
    else:
        status = DominanceStatus.UNDECIDED
    return DominanceVerdict(status, list(xs), cells, refutation, notes, "mc", None, samples, seed)


# ---------------------------------------------------------------------------
# counterexample search


@dataclass
class Witness:
    x: object
    concentrated: object
    diversified_upper: object
    gap: object
    verified_by: str
    z: Optional[float] = None

    def to_dict(self) -> dict:
        d = {
            "x": float(self.x),
            "concentrated": float(self.concentrated),
            "diversified_upper": float(self.diversified_upper),
            "gap": float(self.gap),
            "verified_by": self.verified_by,
        }
        if isinstance(self.x, Fraction):
            d["x_exact"] = fmt(self.x)
            d["gap_exact"] = fmt(self.gap)
        if self.z is not None:
            d["z"] = self.z
        return d


def _self_verify(portfolio: PortfolioSpec, x: Fraction, T: int) -> Optional[tuple]:
    """Recheck an exact witness through an independent code path."""
    conc = concentrated_survival(portfolio, x)
    if portfolio.n <= BRUTE_MAX_N:
        b = brute_force_survival(portfolio, x, min(BRUTE_MAX_T, T))
        how = "brute-force enumeration"
    else:
        b = survival_bounds(weighted_sum_pmf(portfolio.risks, portfolio.weights, 2 * T, max_x=x), x)
        how = "independent convolution at doubled truncation"
    if b.upper < conc:
        return conc, b.upper, how
    return None


def hunt_counterexample(
    portfolio: PortfolioSpec,
    strategy: str = "breakpoint-scan",
    budget=None,
    truncate_at: int = DEFAULT_TRUNCATE,
    samples: int = 10**5,
    seed: int = DEFAULT_SEED,
) -> Optional[Witness]:
    """Smallest-x witness where the concentrated survival beats the diversified one.

    ``breakpoint-scan`` (exact) scans ever longer grids up to ``budget`` (a
    maximum x, default 200). ``bisection`` (Monte Carlo) locates the first
    refuted point of a log grid and bisects ``budget`` times (default 20)
    towards the last consistent point before it.
    """
    if strategy == "breakpoint-scan":
        limit = to_fraction(budget if budget is not None else 200)
        if limit <= 0:
            raise ValueError("budget must be positive")
        hi = min(Fraction(10), limit)
        lo = None
        while True:
            grid = exact_grid(portfolio, hi, min_x=lo)
            v = verify_dominance_exact(portfolio, grid, truncate_at)
            if v.refutation is not None:
                x = v.refutation.x
                chk = _self_verify(portfolio, x, truncate_at)
                if chk is not None:
                    conc, up, how = chk
                    return Witness(x, conc, up, conc - up, how)
            if hi >= limit:
                return None
            lo, hi = hi, min(2 * hi, limit)
    if strategy == "bisection":
        steps = int(budget if budget is not None else 20)
        if steps <= 0:
            raise ValueError("budget must be positive")
        v = verify_dominance_mc(portfolio, samples=samples, seed=seed)
        if v.refutation is None:
            return None
        k = next(i for i, c in enumerate(v.cells) if c.verdict == "refuted")
        bad = v.cells[k]
        good_x = v.cells[k - 1].x if k > 0 else 0.0
        bad_x = bad.x
        for step in range(steps):
            mid = 0.5 * (good_x + bad_x)
            e = estimate_diversified_survival(portfolio, [mid], samples, seed + step + 1)[0]
            conc = float(concentrated_survival(portfolio, mid))
            if e.high < conc:
                bad_x, bad = mid, Cell(mid, conc, e.low, e.high, "refuted", e.point_estimate)
            else:
                good_x = mid
        sd = math.sqrt(max(bad.estimate * (1 - bad.estimate), 1.0 / samples) / samples)
        return Witness(
            bad_x,
            bad.concentrated,
            bad.upper,
            bad.concentrated - bad.upper,
            "Monte Carlo upper confidence bound",
            z=(bad.concentrated - bad.estimate) / sd,
        )
    raise ValueError(f"unknown strategy {strategy!r}; use breakpoint-scan or bisection")


# ---------------------------------------------------------------------------
# reinsurance, transforms, convex order


def reinsurance_check(
    dist: RiskDistribution, theta, horizon: float = DEFAULT_HORIZON
) -> tuple[SubscalabilityVerdict, SubscalabilityVerdict]:
    """(ceded at theta, retained at 1 - theta); both certified means the
    randomized quota share is preferred by both parties."""
    theta = ScalingFactor.of(theta)
    if theta.exact is not None:
        other = ScalingFactor(float(1 - theta.exact), 1 - theta.exact, theta.approximate)
    else:
        other = ScalingFactor.irrational(1.0 - theta.value)
    return check_theta_subscalable(dist, theta, horizon), check_theta_subscalable(dist, other, horizon)


def iid_transform_dominance(
    dist: RiskDistribution,
    weights,
    f: ConvexTransform,
    mode: str = "auto",
    budget: int = DOUBLING_BUDGET,
    truncate_at: int = DEFAULT_TRUNCATE,
    max_x=DEFAULT_MAX_X,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> DominanceVerdict:
    """Check ``f(X) <=st sum theta_i f(X_i)`` directly for iid copies of X."""
    if not isinstance(f, ConvexTransform):
        raise TypeError("f must be a ConvexTransform (validated increasing and convex)")
    w = WeightVector.of(weights)
    base = PortfolioSpec.iid(dist, w)
    notes = []
    if check_onebasket_conditions(base).all_satisfied:
        notes.append("base relation certified by the one-basket conditions")
    else:
        if dist.lattice_exact and w.exact is not None:
            bv = verify_dominance_exact(base, truncate_at=truncate_at, max_x=max_x, budget=budget)
        else:
            bv = verify_dominance_mc(base, samples=min(samples, 10**5), seed=seed)
        if bv.status is DominanceStatus.REFUTED:
            raise ValueError(f"base relation is refuted at x = {float(bv.refutation.x)}; nothing to transport")
        notes.append(f"base relation {bv.status.value} ({bv.mode})")
    y = apply_transform(dist, f)
    port = PortfolioSpec.iid(y, w)
    if mode == "auto":
        mode = "exact" if y.lattice_exact and w.exact is not None else "mc"
    if mode == "exact":
        top = max(to_fraction(max_x), to_fraction(y.support_min) + 1)
        v = verify_dominance_exact(port, truncate_at=truncate_at, max_x=top, budget=budget)
    else:
        v = verify_dominance_mc(port, samples=samples, seed=seed)
    v.notes = notes + v.notes
    return v


@dataclass
class ConvexOrderResult:
    gap: ConvexGap
    consistent: bool

    def to_dict(self) -> dict:
        d = self.gap.to_dict()
        d["consistent"] = self.consistent
        return d


def convex_order_check(
    portfolio: PortfolioSpec,
    cs: Sequence[ConvexTestFunction],
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    cap: float = 10.0,
) -> list[ConvexOrderResult]:
    """Consistent iff the interval for E[c(P_D)] - E[c(P_C)] is not strictly above 0."""
    out = []
    for c in cs:
        g = estimate_convex_gap(portfolio, c, samples, seed, cap=cap)
        out.append(ConvexOrderResult(g, g.difference.low <= 0))
    return out


# ---------------------------------------------------------------------------
# partition of the sample space by threshold events


@dataclass
class PartitionFixture:
    """Thresholds ``u_mu`` for the non-empty subsets of ``{0, .., n-1}`` and a
    finite support per coordinate (the joint support is their product)."""

    n: int
    thresholds: dict[frozenset, float]
    support: tuple[tuple[float, ...], ...]

    def subsets(self) -> list[frozenset]:
        idx = range(self.n)
        return [frozenset(c) for k in range(1, self.n + 1) for c in itertools.combinations(idx, k)]

    def outcomes(self):
        return itertools.product(*self.support)

    def check_hypothesis(self) -> None:
        subs = self.subsets()
        missing = [set(s) for s in subs if s not in self.thresholds]
        if missing:
            raise ValueError(f"missing thresholds for {missing}")
        for mu in subs:
            for lam in subs:
                if mu < lam and self.thresholds[mu] < self.thresholds[lam]:
                    raise ValueError(
                        f"thresholds must shrink along inclusions: u{sorted(mu)}={self.thresholds[mu]} "
                        f"< u{sorted(lam)}={self.thresholds[lam]}"
                    )


def _event_A(x, mu, u) -> bool:
    return all(x[i] > u for i in mu)


def partition_memberships(fixture: PartitionFixture, x) -> list[frozenset]:
    """Every mu (including the empty set) whose event B_mu contains the outcome ``x``."""
    subs = fixture.subsets()
    u = fixture.thresholds
    out = []
    if not any(_event_A(x, lam, u[lam]) for lam in subs):
        out.append(frozenset())
    for mu in subs:
        if _event_A(x, mu, u[mu]) and not any(mu < lam and _event_A(x, lam, u[lam]) for lam in subs):
            out.append(mu)
    return out


def partition_property_check(fixture: PartitionFixture) -> bool:
    """True iff every joint outcome lies in exactly one B_mu."""
    fixture.check_hypothesis()
    return all(len(partition_memberships(fixture, x)) == 1 for x in fixture.outcomes())


def random_partition_fixture(rng: np.random.Generator, n: int, support_size: int = 5) -> PartitionFixture:
    """Random fixture satisfying the hypothesis: u_mu is the largest raw draw
    over all supersets of mu, so u_mu >= u_lambda whenever mu is inside lambda."""
    idx = range(n)
    subs = [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(idx, k)]
    raw = {s: int(rng.integers(0, 10)) for s in subs}
    u = {mu: float(max(raw[lam] for lam in subs if mu <= lam)) for mu in subs}
    support = tuple(
        tuple(sorted(set(int(v) for v in rng.integers(0, 12, size=support_size)))) for _ in idx
    )
    return PartitionFixture(n, u, support)


# ---------------------------------------------------------------------------
# averages of iid copies


@dataclass
class InductionReport:
    rows: list[tuple[str, int, DominanceVerdict]] = field(default_factory=list)
    closure: list[tuple[str, int, bool]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.status is DominanceStatus.CERTIFIED_ON_GRID for _, _, v in self.rows) and all(
            ok for _, _, ok in self.closure
        )

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "rows": [{"risk": name, "n": n, **v.to_dict()} for name, n, v in self.rows],
            "closure": [{"risk": name, "n": n, "ok": ok} for name, n, ok in self.closure],
        }


def _closure_ok(risk: RiskDistribution, n: int, T: int, top: Fraction) -> bool:
    """The law of the n-average equals the (m/n, 1 - m/n) blend of the m- and
    (n-m)-averages with m = floor(n/2), atom by atom."""
    m = n // 2
    direct = weighted_sum_pmf([risk] * n, [Fraction(1, n)] * n, T, max_x=top)
    a = weighted_sum_pmf([risk] * m, [Fraction(1, m)] * m, T, max_x=top * n / m) if m > 1 else None
    b = weighted_sum_pmf([risk] * (n - m), [Fraction(1, n - m)] * (n - m), T, max_x=top * n / (n - m))

    def on_grid(p: Optional[LatticePMF], k: int):
        # p lives on Z/k; scaled by k/n it lives on Z/n with the same indices
        if p is None:
            return {int(v * 1): pr for v, pr in risk.atoms(T) if v * k <= top * n}
        return p.atoms

    cap = direct.index_cap
    blend = _convolve(on_grid(a, m), on_grid(b, n - m), cap)
    blend = {k: p for k, p in blend.items() if p}
    return blend == direct.atoms


def reproduce_inductions(
    n_max: int = 5,
    max_x=40,
    max_width=Fraction(1, 10**4),
    stp_ns: Sequence[int] = (2, 4),
    stp_max_x=2**10,
    stp_width=Fraction(1, 10**3),
) -> InductionReport:
    """Exact grid certification of X <=st average of n iid copies, for the
    discrete Pareto (n = 2..n_max) and the St. Petersburg lottery (n in stp_ns)."""
    if n_max > 6:
        raise ValueError("n_max is capped at 6 (exact convolution cost)")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    rep = InductionReport()
    for name, risk, ns, top, width in (
        ("discrete-pareto", DiscretePareto(), range(2, n_max + 1), max_x, max_width),
        ("st-petersburg", StPetersburg(), stp_ns, stp_max_x, stp_width),
    ):
        for n in ns:
            port = PortfolioSpec.iid(risk, WeightVector.equal(n))
            v = verify_dominance_exact(port, max_x=top, max_width=width, truncate_at=1024)
            rep.rows.append((name, n, v))
            if n >= 3 and name == "discrete-pareto":
                rep.closure.append((name, n, _closure_ok(risk, n, v.truncate_at, to_fraction(top))))
    return rep


# ---------------------------------------------------------------------------
# local dominance below t(theta)


@dataclass
class LocalDominance:
    threshold: Threshold
    verdict: DominanceVerdict
    full: DominanceVerdict

    @property
    def holds(self) -> bool:
        t = float(self.threshold.value)
        below = all(c.verdict != "refuted" for c in self.verdict.cells)
        full_ok = all(float(c.x) >= t or c.verdict != "refuted" for c in self.full.cells)
        return float(self.threshold) > 0 and below and full_ok

    def to_dict(self) -> dict:
        return {
            "t": float(self.threshold.value),
            "t_beyond_horizon": self.threshold.beyond_horizon,
            "holds": self.holds,
            "below_t": self.verdict.to_dict(),
            "full_grid": self.full.to_dict(),
        }


def local_dominance_check(
    portfolio: PortfolioSpec,
    mode: str = "auto",
    horizon: float = 1e3,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> LocalDominance:
    """Dominance must hold on [0, t(theta)) even when it fails globally."""
    t = global_threshold(portfolio, horizon)
    exact = mode == "exact" or (
        mode == "auto" and portfolio.weights.exact is not None and all(r.lattice_exact for r in portfolio.risks)
    )
    tv = t.value
    if exact:
        full = verify_dominance_exact(portfolio)
        below = [x for x in exact_grid(portfolio, max(to_fraction(tv), Fraction(0))) if x < tv]
        v = verify_dominance_exact(portfolio, grid=below or [Fraction(0)])
    else:
        full = verify_dominance_mc(portfolio, samples=samples, seed=seed)
        below = np.linspace(0.0, float(tv), 32, endpoint=False)
        v = verify_dominance_mc(portfolio, grid=below, samples=samples, seed=seed)
    return LocalDominance(t, v, full)
