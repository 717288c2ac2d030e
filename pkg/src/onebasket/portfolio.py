"""Portfolios of independent risks and the one-basket sufficient condition.

The diversified portfolio sum(theta_i * X_i) dominates the concentrated one
(all capital on a single randomly chosen risk) whenever every risk i is
theta_mu-subscalable for every proper subset mu containing i, where theta_mu is
the total weight of mu.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ._numbers import fmt, is_exact, to_fraction
from .dist import RiskDistribution, from_spec
from .subscale import (
    DEFAULT_HORIZON,
    RegionReport,
    ScalingFactor,
    Status,
    SubscalabilityVerdict,
    Threshold,
    check_theta_subscalable,
    r_region,
    t_threshold,
)

MAX_RISKS = 20
SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightVector:
    """Positive weights summing to one.

    ``exact`` carries the rational weights when they are known. Python floats
    are read through their decimal repr; if those decimals do not sum to one
    exactly the floats are renormalized and ``exact`` is dropped.
    """

    weights: tuple[float, ...]
    exact: Optional[tuple[Fraction, ...]] = None
    approximate: bool = False

    @classmethod
    def of(cls, values: Sequence) -> WeightVector:
        if isinstance(values, WeightVector):
            return values
        values = list(values)
        if len(values) < 2:
            raise ValueError(f"need at least two weights, got {len(values)}")
        # binary64 input and decimal strings are exact-as-typed but flagged
        floaty = any(
            (isinstance(v, str) and "/" not in v and not v.strip().lstrip("+-").isdigit())
            or not (is_exact(v) or isinstance(v, str))
            for v in values
        )
        fr = [to_fraction(v) for v in values]
        if any(q <= 0 for q in fr):
            raise ValueError("weights must be strictly positive")
        if sum(fr) == 1:
            return cls(tuple(float(q) for q in fr), tuple(fr), approximate=floaty)
        if not any(isinstance(v, float) or not (is_exact(v) or isinstance(v, str)) for v in values):
            raise ValueError(f"exact weights must sum to 1, got {sum(fr)}")
        fl = [float(v) for v in values]
        total = sum(fl)
        if abs(total - 1.0) > SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, not 1 (tolerance {SUM_TOL})")
        return cls(tuple(v / total for v in fl), None, approximate=True)

    @classmethod
    def equal(cls, n: int) -> WeightVector:
        return cls.of([Fraction(1, n)] * n)

    def __len__(self):
        return len(self.weights)

    def values(self) -> list:
        return list(self.exact) if self.exact is not None else list(self.weights)

    def to_list(self) -> list:
        return [fmt(v) for v in self.values()]


@dataclass(frozen=True)
class PortfolioSpec:
    risks: tuple[RiskDistribution, ...]
    weights: WeightVector

    def __post_init__(self):
        object.__setattr__(self, "risks", tuple(self.risks))
        if not isinstance(self.weights, WeightVector):
            object.__setattr__(self, "weights", WeightVector.of(self.weights))
        if len(self.risks) != len(self.weights):
            raise ValueError(f"{len(self.risks)} risks but {len(self.weights)} weights")
        if len(self.risks) < 2:
            raise ValueError("a portfolio needs at least two risks")

    @property
    def n(self) -> int:
        return len(self.risks)

    @classmethod
    def iid(cls, risk: RiskDistribution, weights) -> PortfolioSpec:
        w = WeightVector.of(weights)
        return cls(tuple([risk] * len(w)), w)

    def to_dict(self) -> dict:
        return {"risks": [r.to_dict() for r in self.risks], "weights": self.weights.to_list()}


def load_portfolio(source) -> tuple[PortfolioSpec, dict]:
    """Parse a portfolio spec (path, JSON text or dict); returns spec and options."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            data = json.loads(text)
        else:
            with open(text) as fh:
                data = json.load(fh)
    if "risks" not in data or "weights" not in data:
        raise ValueError("portfolio spec needs 'risks' and 'weights'")
    risks = tuple(from_spec(r) for r in data["risks"])
    return PortfolioSpec(risks, WeightVector.of(data["weights"])), dict(data.get("options") or {})


# ---------------------------------------------------------------------------
# subset weights


def subset_weights(weights) -> list[list]:
    """For each i, the distinct theta_mu over proper non-empty subsets mu containing i."""
    w = WeightVector.of(weights)
    n = len(w)
    if n > MAX_RISKS:
        raise ValueError(f"subset enumeration is capped at n = {MAX_RISKS}, got n = {n}")
    vals = w.values()
    out = []
    for i in range(n):
        sums = {vals[i]}
        for j in range(n):
            if j != i:
                sums |= {s + vals[j] for s in sums}
        if w.exact is None:
            sums = {round(s, 15) for s in sums}
        # mu = [n] is the unique largest subset sum (all weights are positive)
        sums.discard(max(sums))
        out.append(sorted(sums))
    return out


def _scaling(w: WeightVector, t) -> ScalingFactor:
    if isinstance(t, Fraction):
        return ScalingFactor(float(t), t, approximate=w.approximate)
    return ScalingFactor.of(float(t))


# ---------------------------------------------------------------------------
# condition report


@dataclass
class ConditionEntry:
    index: int
    theta_mu: object
    verdict: SubscalabilityVerdict

    def to_dict(self) -> dict:
        d = {"risk": self.index, "theta_mu": fmt(self.theta_mu)}
        d.update(self.verdict.to_dict())
        return d


@dataclass
class ConditionReport:
    entries: list[ConditionEntry] = field(default_factory=list)

    @property
    def all_satisfied(self) -> bool:
        return all(e.verdict.status is Status.CERTIFIED for e in self.entries)

    @property
    def failing_entry(self) -> Optional[ConditionEntry]:
        for status in (Status.REFUTED, Status.UNDECIDED):
            for e in self.entries:
                if e.verdict.status is status:
                    return e
        return None

    @property
    def status(self) -> Status:
        if self.all_satisfied:
            return Status.CERTIFIED
        if any(e.verdict.refuted for e in self.entries):
            return Status.REFUTED
        return Status.UNDECIDED

    def to_dict(self) -> dict:
        f = self.failing_entry
        return {
            "status": self.status.value,
            "all_satisfied": self.all_satisfied,
            "failing_entry": None
            if f is None
            else {
                "risk": f.index,
                "theta_mu": fmt(f.theta_mu),
                "witness_x": None if f.verdict.witness_x is None else float(f.verdict.witness_x),
            },
            "entries": [e.to_dict() for e in self.entries],
        }


def _entries(portfolio: PortfolioSpec):
    """``(i, risk, theta_mu, ScalingFactor)`` for every condition entry."""
    sw = subset_weights(portfolio.weights)
    for i, (risk, ts) in enumerate(zip(portfolio.risks, sw)):
        for t in ts:
            yield i, risk, t, _scaling(portfolio.weights, t)


def check_onebasket_conditions(portfolio: PortfolioSpec, horizon: float = DEFAULT_HORIZON) -> ConditionReport:
    memo: dict = {}
    report = ConditionReport()
    for i, risk, t, theta in _entries(portfolio):
        key = (risk, theta)
        if key not in memo:
            memo[key] = check_theta_subscalable(risk, theta, horizon)
        report.entries.append(ConditionEntry(i, t, memo[key]))
    return report


def global_threshold(portfolio: PortfolioSpec, horizon: float = DEFAULT_HORIZON) -> Threshold:
    """Minimum of the per-entry thresholds; positive for every portfolio."""
    memo: dict = {}
    best: Optional[Threshold] = None
    for _, risk, _, theta in _entries(portfolio):
        key = (risk, theta)
        if key not in memo:
            memo[key] = t_threshold(risk, theta, horizon)
        t = memo[key]
        if best is None or float(t.value) < float(best.value) or (
            t.value == best.value and not t.beyond_horizon
        ):
            best = t
    return best


def _intersect(a: list, b: list) -> list:
    out, i, j = [], 0, 0
    while i < len(a) and j < len(b):
        lo = max(a[i][0], b[j][0])
        hi = min(a[i][1], b[j][1])
        if lo < hi:
            out.append((lo, hi))
        if a[i][1] < b[j][1]:
            i += 1
        else:
            j += 1
    return out


def region_R(portfolio: PortfolioSpec, horizon: float = DEFAULT_HORIZON) -> RegionReport:
    """Intersection of the per-entry regions."""
    memo: dict = {}
    ivs: list = [(0, horizon)]
    certified = True
    for _, risk, _, theta in _entries(portfolio):
        key = (risk, theta)
        if key not in memo:
            memo[key] = r_region(risk, theta, horizon)
        rep = memo[key]
        certified = certified and rep.certified
        ivs = _intersect(ivs, rep.intervals)
    complete = len(ivs) == 1 and ivs[0][0] == 0 and ivs[0][1] == horizon
    return RegionReport(ivs, horizon, complete=complete, certified=certified)
