"""Theta-subscalability of a single risk.

A risk X is theta-subscalable when ``theta * P(X > x) <= P(X > x / theta)``
for every ``x >= 0``, and completely subscalable when this holds for every
theta in (0, 1), which is the same as ``h(x) = x * P(X > x)`` being
non-decreasing.

Verdicts come in three flavours: CERTIFIED (an analytic argument or an
exhaustive breakpoint scan backs the claim), REFUTED (with a witness that is
re-checked before it is returned) and UNDECIDED (nothing found up to the
scan horizon, but nothing proved either).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional

import numpy as np

from ._numbers import fmt, is_exact, leq_tol, to_fraction
from .dist import (
    DiscretePareto,
    Frechet1,
    LogHarmonic,
    Pareto,
    RiskDistribution,
    StPetersburg,
    Transformed,
    Trivial,
)

POINTS_PER_DECADE = 4096
GRID_START = 1e-6
IRRATIONAL_SEARCH = 10**6
# direct search for the smallest discrete Pareto witness before falling back
# to the modular-inverse witness
RESIDUE_SEARCH = 2 * 10**6
BISECT_TOL = 1e-9
DEFAULT_HORIZON = 1e4


class Status(Enum):
    CERTIFIED = "CERTIFIED"
    REFUTED = "REFUTED"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class ScalingFactor:
    """A scaling factor theta in (0, 1).

    ``exact`` holds the rational value when one is known. Values typed in as
    binary64 are read through their decimal repr and flagged ``approximate``;
    ``exact=None`` marks a genuinely irrational theta (for instance 2**-0.5).
    """

    value: float
    exact: Optional[Fraction] = None
    approximate: bool = False

    def __post_init__(self):
        if not (0 < self.value < 1):
            raise ValueError(f"scaling factor must lie in (0, 1), got {self.value}")
        if self.exact is not None and not (0 < self.exact < 1):
            raise ValueError(f"scaling factor must lie in (0, 1), got {self.exact}")

    @classmethod
    def of(cls, x) -> ScalingFactor:
        if isinstance(x, ScalingFactor):
            return x
        if isinstance(x, str):
            q = to_fraction(x)
            return cls(float(q), q, approximate=False)
        if is_exact(x):
            q = Fraction(x)
            return cls(float(q), q)
        q = to_fraction(float(x))
        return cls(float(x), q, approximate=True)

    @classmethod
    def irrational(cls, value: float) -> ScalingFactor:
        return cls(float(value), None)

    @property
    def exact_rational(self) -> Optional[tuple[int, int]]:
        if self.exact is None:
            return None
        return self.exact.numerator, self.exact.denominator

    def power(self, k: int) -> ScalingFactor:
        if self.exact is not None:
            q = self.exact**k
            return ScalingFactor(float(q), q, self.approximate)
        return ScalingFactor.irrational(self.value**k)

    def __float__(self):
        return self.value

    def __str__(self):
        return str(self.exact) if self.exact is not None else repr(self.value)


@dataclass
class SubscalabilityVerdict:
    status: Status
    witness_x: object = None
    certificate: Optional[str] = None
    scan_horizon: Optional[float] = None
    witness_pair: Optional[tuple] = None
    note: str = ""

    @property
    def refuted(self) -> bool:
        return self.status is Status.REFUTED

    @property
    def certified(self) -> bool:
        return self.status is Status.CERTIFIED

    def to_dict(self) -> dict:
        d = {
            "status": self.status.value,
            "witness_x": None if self.witness_x is None else float(self.witness_x),
            "certificate": self.certificate,
            "scan_horizon": self.scan_horizon,
        }
        if isinstance(self.witness_x, Fraction):
            d["witness_x_exact"] = fmt(self.witness_x)
        if self.witness_pair is not None:
            d["witness_pair"] = [float(v) for v in self.witness_pair]
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class RegionReport:
    """Half-open intervals ``[a, b)`` of ``[0, horizon]`` where the inequality holds."""

    intervals: list[tuple]
    horizon: float
    complete: bool = False
    certified: bool = False

    def contains(self, x) -> bool:
        if x == self.horizon and self.intervals and self.intervals[-1][1] == self.horizon:
            return True
        return any(a <= x < b for a, b in self.intervals)

    def to_dict(self) -> dict:
        return {
            "intervals": [[float(a), float(b)] for a, b in self.intervals],
            "horizon": self.horizon,
            "complete": self.complete,
            "certified": self.certified,
        }


@dataclass(frozen=True)
class Threshold:
    """First failure point of the pointwise inequality, or the horizon if none."""

    value: object
    beyond_horizon: bool

    def __float__(self):
        return float(self.value)

    def __str__(self):
        v = fmt(self.value) if isinstance(self.value, Fraction) else f"{float(self.value):.10g}"
        return f">= {v}" if self.beyond_horizon else str(v)


# ---------------------------------------------------------------------------
# pointwise check


def _exact_mode(dist: RiskDistribution, theta: ScalingFactor, x) -> bool:
    return dist.lattice_exact and theta.exact is not None and is_exact(x)


def check_pointwise(dist: RiskDistribution, theta, x) -> bool:
    """``theta * F(x) <= F(x / theta)`` for the survival function F.

    Exact when the risk is lattice-exact and both theta and x are rational;
    otherwise binary64 with relative tolerance 1e-12, ties counting as a pass.
    """
    theta = ScalingFactor.of(theta)
    if x < 0:
        raise ValueError("x must be non-negative")
    if _exact_mode(dist, theta, x):
        t = theta.exact
        return t * dist.survival(x) <= dist.survival(Fraction(x) / t)
    x = float(x)
    return leq_tol(theta.value * float(dist.survival(x)), float(dist.survival(x / theta.value)))


def _pointwise_array(dist: RiskDistribution, theta: ScalingFactor, xs: np.ndarray) -> np.ndarray:
    lhs = theta.value * dist.survival_array(xs)
    rhs = dist.survival_array(xs / theta.value)
    return lhs <= rhs + 1e-12 * np.maximum(np.maximum(np.abs(lhs), np.abs(rhs)), 1e-300)


# ---------------------------------------------------------------------------
# the two exactly characterized step families


def discrete_pareto_A_membership(theta) -> bool:
    """theta in (0, 1/2] or theta = (k+1)/(2k+1) for some k."""
    theta = ScalingFactor.of(theta)
    if theta.exact is None:
        return theta.value <= 0.5
    a, b = theta.exact_rational
    return 2 * a <= b or 2 * a == b + 1


def st_petersburg_B_membership(theta) -> bool:
    """theta = 2**-k for some k >= 1."""
    theta = ScalingFactor.of(theta)
    if theta.exact is None:
        return False
    a, b = theta.exact_rational
    return a == 1 and b & (b - 1) == 0


def _discrete_pareto_first_failure(theta: ScalingFactor):
    """Smallest failure point of the discrete Pareto inequality, exact theta.

    With theta = a/b in lowest terms the inequality fails at x = j*theta iff
    (j*a mod b) > 2*(b - a), and every failure cell starts at such a point.
    Returns ``(x, is_smallest)``.
    """
    a, b = theta.exact_rational
    bound = 2 * (b - a)
    for j in range(1, min(b, RESIDUE_SEARCH) + 1):
        if (j * a) % b > bound:
            return Fraction(j * a, b), True
    # j*a = -1 (mod b) always fails outside the set
    j = (-pow(a, -1, b)) % b
    return Fraction(j * a, b), False


def _discrete_pareto_irrational_witness(theta: float):
    """Midpoint of a failing cell for irrational theta, or None."""
    bound = 2.0 * (1.0 - theta) + 1e-9
    chunk = 1 << 16
    for start in range(1, IRRATIONAL_SEARCH + 1, chunk):
        j = np.arange(start, min(start + chunk, IRRATIONAL_SEARCH + 1), dtype=float)
        jt = j * theta
        frac = jt - np.floor(jt)
        hit = np.nonzero(frac > bound)[0]
        if hit.size:
            k = hit[0]
            left = jt[k]
            right = min(math.floor(left) + 1.0, left + theta)
            return 0.5 * (left + right)
    return None


def _st_petersburg_witness(theta: ScalingFactor):
    """First failure point 2**k * theta where 2**-k < theta < 2**-(k-1)."""
    if theta.exact is not None:
        t = theta.exact
        k = 1
        while Fraction(1, 2**k) >= t:
            k += 1
        return t * 2**k
    k = 1
    while 2.0**-k >= theta.value:
        k += 1
    # midpoint of [2**k * theta, 2) keeps floating evaluation off the edge
    return 0.5 * (theta.value * 2.0**k + 2.0)


# ---------------------------------------------------------------------------
# grids


def log_grid(lo: float, hi: float, per_decade: int = POINTS_PER_DECADE) -> np.ndarray:
    if hi <= lo:
        return np.array([hi])
    n = max(2, int(math.ceil(math.log10(hi / lo) * per_decade)) + 1)
    return np.geomspace(lo, hi, n)


def _continuous_probe(dist: RiskDistribution, theta: ScalingFactor, horizon: float) -> np.ndarray:
    grid = log_grid(GRID_START, horizon)
    crit = np.array(dist.critical_points(horizon / theta.value) + [float(dist.support_min)], dtype=float)
    crit = crit[np.isfinite(crit)]
    extra = np.concatenate([crit, crit * theta.value, np.nextafter(crit, -np.inf)])
    pts = np.concatenate([[0.0], grid, extra])
    pts = pts[(pts >= 0) & (pts <= horizon)]
    return np.unique(pts)


def _lattice_points(dist: RiskDistribution, theta: ScalingFactor, horizon) -> list:
    """Left endpoints of the cells on which both sides are constant."""
    if theta.exact is not None:
        t = theta.exact
        h = to_fraction(horizon)
    else:
        t = theta.value
        h = float(horizon)
    bps = dist.breakpoints(h / t)
    pts = {Fraction(0)} if theta.exact is not None else {0.0}
    for b in bps:
        if 0 <= b <= h:
            pts.add(b if theta.exact is not None else float(b))
        tb = t * b if theta.exact is not None else t * float(b)
        if 0 <= tb <= h:
            pts.add(tb)
    return sorted(pts)


def _lattice_cells(dist, theta, horizon):
    """``(left, right, passes)`` for each constant cell of ``[0, horizon]``."""
    pts = _lattice_points(dist, theta, horizon)
    h = to_fraction(horizon) if theta.exact is not None else float(horizon)
    out = []
    for k, p in enumerate(pts):
        q = pts[k + 1] if k + 1 < len(pts) else h
        if theta.exact is not None:
            probe = p
        else:
            # floating theta: probe the interior so rounding at the edges cannot bite
            probe = 0.5 * (p + q) if q > p else p
        out.append((p, q, check_pointwise(dist, theta, probe), probe))
    return out


# ---------------------------------------------------------------------------
# theta-subscalability


def _analytic_complete(dist: RiskDistribution) -> Optional[str]:
    """Certificate tag when complete subscalability is known analytically."""
    if isinstance(dist, Trivial):
        return "trivial"
    if isinstance(dist, Pareto) and dist.alpha <= 1:
        return "pareto-alpha-le-1"
    if isinstance(dist, Frechet1):
        return "frechet1"
    if isinstance(dist, Transformed) and dist.g.anchored:
        base = _analytic_complete(dist.base)
        if base is not None:
            return f"anchored-convex-transform({base})"
    return None


def _refuted(dist, theta, x, horizon, cert=None, note="") -> SubscalabilityVerdict:
    if check_pointwise(dist, theta, x):
        return SubscalabilityVerdict(
            Status.UNDECIDED, None, None, horizon, note=f"candidate witness {float(x)!r} did not verify"
        )
    return SubscalabilityVerdict(Status.REFUTED, x, cert, horizon, note=note)


def check_theta_subscalable(dist: RiskDistribution, theta, horizon: float = DEFAULT_HORIZON) -> SubscalabilityVerdict:
    theta = ScalingFactor.of(theta)
    if not horizon > 0:
        raise ValueError("horizon must be positive")

    cert = _analytic_complete(dist)
    if cert is not None:
        return SubscalabilityVerdict(Status.CERTIFIED, certificate=cert, scan_horizon=None)

    if isinstance(dist, Pareto):
        # alpha > 1: at x = rho the left side is theta and the right side theta**alpha
        return _refuted(dist, theta, dist.rho, horizon, "pareto-alpha-gt-1")

    if isinstance(dist, LogHarmonic):
        v = _refuted(dist, theta, 3.0, horizon, "log-harmonic")
        return v if v.refuted else _refuted(dist, theta, math.e, horizon, "log-harmonic")

    if isinstance(dist, DiscretePareto):
        if discrete_pareto_A_membership(theta):
            note = "theta entered as binary64; decided on its decimal value" if theta.approximate else ""
            if theta.exact is None and theta.value <= 0.5:
                return SubscalabilityVerdict(Status.CERTIFIED, certificate="set-A(theta<=1/2)")
            return SubscalabilityVerdict(Status.CERTIFIED, certificate="set-A", note=note)
        if theta.exact is not None:
            x, _ = _discrete_pareto_first_failure(theta)
            return _refuted(dist, theta, x, horizon, "set-A")
        x = _discrete_pareto_irrational_witness(theta.value)
        if x is None:
            return SubscalabilityVerdict(
                Status.UNDECIDED,
                scan_horizon=horizon,
                note=f"no witness among the first {IRRATIONAL_SEARCH} multiples of theta",
            )
        return _refuted(dist, theta, x, horizon, "set-A")

    if isinstance(dist, StPetersburg):
        if st_petersburg_B_membership(theta):
            return SubscalabilityVerdict(Status.CERTIFIED, certificate="set-B")
        return _refuted(dist, theta, _st_petersburg_witness(theta), horizon, "set-B")

    # generic path: scan
    if dist.lattice_exact:
        for left, _, ok, probe in _lattice_cells(dist, theta, horizon):
            if not ok:
                return _refuted(dist, theta, probe, horizon, None, note="breakpoint scan")
        return SubscalabilityVerdict(
            Status.UNDECIDED, scan_horizon=float(horizon), note="no failure on any cell up to the horizon"
        )
    xs = _continuous_probe(dist, theta, float(horizon))
    ok = _pointwise_array(dist, theta, xs)
    bad = np.nonzero(~ok)[0]
    if bad.size:
        return _refuted(dist, theta, float(xs[bad[0]]), float(horizon), None, note="grid scan")
    return SubscalabilityVerdict(
        Status.UNDECIDED, scan_horizon=float(horizon), note="no failure on the refinement grid"
    )


# ---------------------------------------------------------------------------
# complete subscalability


def _h(dist: RiskDistribution, x):
    return x * dist.survival(x)


def _jump_pair(dist: RiskDistribution, horizon):
    """Pair ``x1 < p`` with ``h(x1) > h(p)`` at the first jump ``p > 0``."""
    bps = dist.breakpoints(to_fraction(horizon))
    prev = Fraction(0)
    for p in bps:
        if p <= 0:
            continue
        if dist.survival(p) < dist.survival(p - (p - prev) / 10**12):
            delta = (p - prev) / 100
            x1 = p - delta
            for _ in range(200):
                if _h(dist, x1) > _h(dist, p):
                    return x1, p
                delta /= 2
                x1 = p - delta
        prev = p
    return None


def check_completely_subscalable(
    dist: RiskDistribution, grid=None, horizon: float = DEFAULT_HORIZON
) -> SubscalabilityVerdict:
    """CERTIFIED when h(x) = x * F(x) is provably non-decreasing, REFUTED with a
    pair ``x1 < x2`` where ``h(x1) > h(x2)``, else UNDECIDED."""
    if grid is not None and len(grid) == 0:
        raise ValueError("probe grid is empty")
    cert = _analytic_complete(dist)
    if cert is not None:
        return SubscalabilityVerdict(Status.CERTIFIED, certificate=cert)

    pair = None
    if isinstance(dist, Pareto):
        pair = (dist.rho, 2 * dist.rho)
    elif isinstance(dist, LogHarmonic):
        pair = (0.99 * math.e, math.e)
    elif dist.lattice_exact:
        pair = _jump_pair(dist, horizon)
    else:
        if grid is None:
            xs = log_grid(GRID_START, float(horizon))
            crit = np.array(dist.critical_points(float(horizon)), dtype=float)
            xs = np.unique(np.concatenate([xs, crit, np.nextafter(crit, -np.inf)]))
        else:
            xs = np.unique(np.asarray(grid, dtype=float))
        xs = xs[xs > 0]
        hs = xs * dist.survival_array(xs)
        best = np.maximum.accumulate(hs)
        drop = hs < best * (1 - 1e-12)
        bad = np.nonzero(drop)[0]
        if bad.size:
            k = bad[0]
            i = int(np.argmax(hs[: k + 1]))
            pair = (float(xs[i]), float(xs[k]))
    scan = None if grid is not None else float(horizon)
    if pair is not None:
        x1, x2 = pair
        if x1 < x2 and _h(dist, x1) > _h(dist, x2):
            return SubscalabilityVerdict(Status.REFUTED, witness_x=x1, witness_pair=(x1, x2), scan_horizon=scan)
    return SubscalabilityVerdict(Status.UNDECIDED, scan_horizon=scan, note="h non-decreasing on the probe grid")


# ---------------------------------------------------------------------------
# closure under powers, infinite-mean evidence


def theta_power_closure_check(
    dist: RiskDistribution, theta, k_max: int, horizon: float = DEFAULT_HORIZON
) -> list[SubscalabilityVerdict]:
    """Verdicts for theta**2 .. theta**k_max; a theta-subscalable risk stays
    subscalable under powers of theta, so none of them may be REFUTED."""
    theta = ScalingFactor.of(theta)
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    base = check_theta_subscalable(dist, theta, horizon)
    if not base.certified:
        raise ValueError(f"{dist} is not certified {theta}-subscalable ({base.status.value})")
    return [check_theta_subscalable(dist, theta.power(k), horizon) for k in range(2, k_max + 1)]


@dataclass
class InfiniteMeanEvidence:
    c: object
    points: list[tuple] = field(default_factory=list)  # (x0/theta**k, h)
    holds: bool = True

    def to_dict(self):
        return {
            "c": float(self.c),
            "points": [[float(x), float(h)] for x, h in self.points],
            "holds": self.holds,
        }


def infinite_mean_witness(dist: RiskDistribution, theta, x0, k_max: int = 10) -> InfiniteMeanEvidence:
    """Check ``h(x0 / theta**k) >= h(x0)`` for k = 1..k_max.

    A theta-subscalable risk has h bounded below along the geometric sequence,
    so ``E[X] >= sum of c * (1 - theta) ...`` diverges.
    """
    theta = ScalingFactor.of(theta)
    if not x0 > 0:
        raise ValueError("x0 must be positive")
    exact = _exact_mode(dist, theta, x0)
    c = _h(dist, Fraction(x0) if exact else float(x0))
    if c == 0:
        raise ValueError("x0 * F(x0) = 0: the risk is trivial at x0")
    v = check_theta_subscalable(dist, theta)
    if not v.certified:
        raise ValueError(f"{dist} is not certified {theta}-subscalable ({v.status.value})")
    ev = InfiniteMeanEvidence(c)
    for k in range(1, k_max + 1):
        if exact:
            x = Fraction(x0) / theta.exact**k
            hv = _h(dist, x)
            ok = hv >= c
        else:
            x = float(x0) / theta.value**k
            hv = float(_h(dist, x))
            ok = leq_tol(float(c), hv)
        ev.points.append((x, hv))
        ev.holds = ev.holds and ok
    return ev


# ---------------------------------------------------------------------------
# region r(theta) and threshold t(theta)


def _merge(cells, horizon):
    out: list[list] = []
    for a, b, ok in cells:
        if not ok or b <= a:
            continue
        if out and out[-1][1] == a:
            out[-1][1] = b
        else:
            out.append([a, b])
    return [tuple(iv) for iv in out]


def _bisect(dist, theta, lo: float, hi: float) -> tuple[float, float]:
    """Shrink ``[lo, hi]`` with ``lo`` passing and ``hi`` failing (or vice versa)."""
    want = check_pointwise(dist, theta, lo)
    while hi - lo > BISECT_TOL * max(1.0, abs(lo)):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if check_pointwise(dist, theta, mid) == want:
            lo = mid
        else:
            hi = mid
    return lo, hi


def r_region(dist: RiskDistribution, theta, horizon: float = DEFAULT_HORIZON) -> RegionReport:
    theta = ScalingFactor.of(theta)
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if _analytic_complete(dist) is not None:
        return RegionReport([(0, horizon)], horizon, complete=True, certified=True)
    if dist.lattice_exact:
        cells = [(a, b, ok) for a, b, ok, _ in _lattice_cells(dist, theta, horizon)]
        ivs = _merge(cells, horizon)
    else:
        xs = _continuous_probe(dist, theta, float(horizon))
        xs = np.unique(np.concatenate([xs, [float(horizon)]]))
        ok = _pointwise_array(dist, theta, xs)
        # boundaries between consecutive probes of opposite outcome
        edges = [0.0]
        flags = [bool(ok[0])]
        for k in np.nonzero(ok[1:] != ok[:-1])[0]:
            lo, hi = _bisect(dist, theta, float(xs[k]), float(xs[k + 1]))
            edges.append(hi)
            flags.append(bool(ok[k + 1]))
        edges.append(float(horizon))
        cells = [(edges[i], edges[i + 1], flags[i]) for i in range(len(flags))]
        ivs = _merge(cells, horizon)
    complete = len(ivs) == 1 and ivs[0][0] == 0 and ivs[0][1] == horizon
    return RegionReport(ivs, horizon, complete=complete)


def t_threshold(dist: RiskDistribution, theta, horizon: float = DEFAULT_HORIZON) -> Threshold:
    """Largest t such that the inequality holds for every x in [0, t)."""
    theta = ScalingFactor.of(theta)
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    v = check_theta_subscalable(dist, theta, horizon)
    if v.certified:
        return Threshold(horizon, True)
    if isinstance(dist, DiscretePareto) and theta.exact is not None:
        x, smallest = _discrete_pareto_first_failure(theta)
        if smallest:
            return Threshold(x, False) if x < horizon else Threshold(horizon, True)
    if isinstance(dist, StPetersburg):
        x = _st_petersburg_witness(theta)
        if theta.exact is not None:
            return Threshold(x, False) if x < horizon else Threshold(horizon, True)
    if dist.lattice_exact:
        for left, _, ok, _ in _lattice_cells(dist, theta, horizon):
            if not ok:
                return Threshold(left, False)
        return Threshold(horizon, True)
    xs = _continuous_probe(dist, theta, float(horizon))
    ok = _pointwise_array(dist, theta, xs)
    bad = np.nonzero(~ok)[0]
    if not bad.size:
        return Threshold(horizon, True)
    k = bad[0]
    if k == 0:
        return Threshold(float(xs[0]), False)
    _, hi = _bisect(dist, theta, float(xs[k - 1]), float(xs[k]))
    return Threshold(hi, False)
