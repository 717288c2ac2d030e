"""Seeded Monte Carlo estimates with distribution-free confidence bounds.

Draws are produced in fixed-size chunks, each from its own generator seeded by
``SeedSequence(seed, spawn_key=(chunk,))``, so results do not depend on how
many worker threads process the chunks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from statistics import NormalDist
from typing import Optional, Sequence

import numpy as np

from .portfolio import PortfolioSpec

DEFAULT_SEED = 0x0B5E55ED
DEFAULT_DELTA = 1e-6
CHUNK = 1 << 16
MIN_SAMPLES = 1000


class BoundKind(Enum):
    HOEFFDING = "hoeffding"
    WILSON = "wilson"
    # Hoeffding and empirical Bernstein at delta/2 each, intervals intersected
    HOEFFDING_BERNSTEIN = "hoeffding+bernstein"


@dataclass(frozen=True)
class MCEstimate:
    point_estimate: float
    sample_count: int
    bound_kind: BoundKind
    confidence_level: float
    interval: tuple[float, float]
    seed: int

    @property
    def low(self) -> float:
        return self.interval[0]

    @property
    def high(self) -> float:
        return self.interval[1]

    def contains(self, p: float) -> bool:
        return self.low <= p <= self.high

    def to_dict(self) -> dict:
        return {
            "estimate": self.point_estimate,
            "low": self.low,
            "high": self.high,
            "samples": self.sample_count,
            "bound": self.bound_kind.value,
            "confidence": self.confidence_level,
            "seed": self.seed,
        }


def hoeffding_halfwidth(n: int, delta: float = DEFAULT_DELTA, width: float = 1.0) -> float:
    """Two-sided Hoeffding half-width for the mean of n draws in an interval of ``width``."""
    return width * math.sqrt(math.log(2.0 / delta) / (2.0 * n))


def bernstein_halfwidth(n: int, sample_var: float, delta: float, width: float) -> float:
    """Two-sided empirical Bernstein half-width (Maurer and Pontil)."""
    lg = math.log(4.0 / delta)
    return math.sqrt(2.0 * sample_var * lg / n) + 7.0 * width * lg / (3.0 * (n - 1))


def wilson_interval(k: int, n: int, delta: float = DEFAULT_DELTA) -> tuple[float, float]:
    z = NormalDist().inv_cdf(1.0 - delta / 2.0)
    p = k / n
    den = 1.0 + z * z / n
    mid = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return max(0.0, mid - half), min(1.0, mid + half)


def _proportion(k: int, n: int, delta: float, bound: BoundKind, seed: int) -> MCEstimate:
    p = k / n
    if bound is BoundKind.WILSON:
        lo, hi = wilson_interval(k, n, delta)
    else:
        h = hoeffding_halfwidth(n, delta)
        lo, hi = max(0.0, p - h), min(1.0, p + h)
    return MCEstimate(p, n, bound, 1.0 - delta, (lo, hi), seed)


# ---------------------------------------------------------------------------
# chunked sampling


def _chunks(samples: int, chunk: int):
    return [(c, min(chunk, samples - c * chunk)) for c in range((samples + chunk - 1) // chunk)]


def _draw(portfolio: PortfolioSpec, seed: int, chunk: int, size: int):
    """Marginal draws (n x size) and the mixture's selected index for one chunk."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    xs = np.empty((portfolio.n, size))
    for i, r in enumerate(portfolio.risks):
        xs[i] = r.quantile_array(rng.random(size))
    cum = np.cumsum(portfolio.weights.weights)
    idx = np.minimum(np.searchsorted(cum, rng.random(size), side="right"), portfolio.n - 1)
    return xs, idx


def _lattice_plan(portfolio: PortfolioSpec):
    """Integer multipliers when sums can be formed exactly on Z/q, else None."""
    w = portfolio.weights
    if w.exact is None or not all(r.integer_valued for r in portfolio.risks):
        return None
    q = 1
    for t in w.exact:
        q = q * t.denominator // math.gcd(q, t.denominator)
    return q, np.array([float(t * q) for t in w.exact])


def _thresholds(xs: np.ndarray, plan) -> np.ndarray:
    if plan is None:
        return xs
    q = plan[0]
    return np.array([float(math.floor(Fraction(repr(float(x))) * q)) for x in xs])


def _run(fn, jobs, workers: Optional[int]):
    if workers is not None and workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def _exceedances(portfolio, xs, samples, seed, workers, chunk, which: str) -> np.ndarray:
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        raise ValueError("empty probe grid")
    plan = _lattice_plan(portfolio)
    thr = _thresholds(xs, plan)
    order = np.argsort(thr)
    thr_sorted = thr[order]
    theta = np.array(portfolio.weights.weights)

    def job(arg):
        c, size = arg
        draws, idx = _draw(portfolio, seed, c, size)
        if which == "diversified":
            if plan is not None:
                s = plan[1] @ draws
            else:
                s = theta @ draws
        else:
            s = draws[idx, np.arange(size)]
            if plan is not None:
                s = s * plan[0]
        s.sort()
        return size - np.searchsorted(s, thr_sorted, side="right")

    counts = np.zeros(xs.size, dtype=np.int64)
    for part in _run(job, _chunks(samples, chunk), workers):
        counts += part
    out = np.empty_like(counts)
    out[order] = counts
    return out


def estimate_diversified_survival(
    portfolio: PortfolioSpec,
    xs: Sequence[float],
    samples: int,
    seed: int = DEFAULT_SEED,
    delta: float = DEFAULT_DELTA,
    bound: BoundKind = BoundKind.HOEFFDING,
    workers: Optional[int] = None,
    chunk: int = CHUNK,
) -> list[MCEstimate]:
    """P(sum theta_i X_i > x) for each x, one shared pass of ``samples`` draws."""
    counts = _exceedances(portfolio, xs, samples, seed, workers, chunk, "diversified")
    return [_proportion(int(k), samples, delta, bound, seed) for k in counts]


def estimate_mixture_survival(
    portfolio: PortfolioSpec,
    xs: Sequence[float],
    samples: int,
    seed: int = DEFAULT_SEED,
    delta: float = DEFAULT_DELTA,
    bound: BoundKind = BoundKind.HOEFFDING,
    workers: Optional[int] = None,
    chunk: int = CHUNK,
) -> list[MCEstimate]:
    """P(X_I > x) with I drawn from the weights; audits the samplers."""
    counts = _exceedances(portfolio, xs, samples, seed, workers, chunk, "mixture")
    return [_proportion(int(k), samples, delta, bound, seed) for k in counts]


# ---------------------------------------------------------------------------
# convex test functions


class ConvexForm(Enum):
    POWER = "power"
    HINGE = "hinge"
    IDENTITY = "identity"
    NEGATED_IDENTITY = "negated-identity"


@dataclass(frozen=True)
class ConvexTestFunction:
    form: ConvexForm
    parameter: float = 0.0

    def __post_init__(self):
        if self.form is ConvexForm.POWER and self.parameter < 1:
            raise ValueError("power test functions need p >= 1")

    @classmethod
    def power(cls, p: float) -> ConvexTestFunction:
        return cls(ConvexForm.POWER, float(p))

    @classmethod
    def hinge(cls, a: float) -> ConvexTestFunction:
        return cls(ConvexForm.HINGE, float(a))

    @classmethod
    def identity(cls) -> ConvexTestFunction:
        return cls(ConvexForm.IDENTITY)

    @classmethod
    def negated_identity(cls) -> ConvexTestFunction:
        return cls(ConvexForm.NEGATED_IDENTITY)

    @classmethod
    def parse(cls, text: str) -> ConvexTestFunction:
        """``identity``, ``negated-identity``, ``power:2``, ``hinge:1``."""
        name, _, arg = text.partition(":")
        form = ConvexForm(name)
        return cls(form, float(arg) if arg else (1.0 if form is ConvexForm.POWER else 0.0))

    @property
    def superlinear(self) -> bool:
        return self.form is ConvexForm.POWER and self.parameter > 1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.form is ConvexForm.POWER:
            return np.maximum(x, 0.0) ** self.parameter
        if self.form is ConvexForm.HINGE:
            return np.maximum(x - self.parameter, 0.0)
        if self.form is ConvexForm.IDENTITY:
            return x
        return -x

    def __str__(self):
        if self.form in (ConvexForm.POWER, ConvexForm.HINGE):
            return f"{self.form.value}({self.parameter:g})"
        return self.form.value


@dataclass(frozen=True)
class ConvexGap:
    """Paired estimates of E[c(P_D)], E[c(P_C)] and their difference."""

    c: ConvexTestFunction
    diversified: MCEstimate
    concentrated: MCEstimate
    difference: MCEstimate
    cap: float
    scale: float

    def to_dict(self) -> dict:
        return {
            "c": str(self.c),
            "cap": self.cap,
            "scale": self.scale,
            "diversified": self.diversified.to_dict(),
            "concentrated": self.concentrated.to_dict(),
            "difference": self.difference.to_dict(),
        }


def _mean_interval(total: float, total_sq: float, n: int, width: float, delta: float, bound: BoundKind):
    mean = total / n
    var = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    if bound is BoundKind.HOEFFDING:
        h = hoeffding_halfwidth(n, delta, width)
    else:
        h = min(hoeffding_halfwidth(n, delta / 2, width), bernstein_halfwidth(n, var, delta / 2, width))
    return mean, (mean - h, mean + h)


def estimate_convex_gap(
    portfolio: PortfolioSpec,
    c: ConvexTestFunction,
    samples: int,
    seed: int = DEFAULT_SEED,
    cap: float = 10.0,
    delta: float = DEFAULT_DELTA,
    bound: BoundKind = BoundKind.HOEFFDING_BERNSTEIN,
    workers: Optional[int] = None,
    chunk: int = CHUNK,
) -> ConvexGap:
    """Common-random-number comparison of E[c(P_D)] and E[c(P_C)].

    Every risk is clipped at ``cap`` so all quantities are bounded. The
    concentrated side is averaged over the selected index given the draws,
    i.e. it uses ``sum theta_i c(X_i)``, which has the same expectation as
    ``c(X_I)`` and shares every draw with the diversified side.
    ``scale`` is the range of c over the clipped support.
    """
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples, got {samples}")
    if c.superlinear:
        bad = [str(r) for r in portfolio.risks if r.mean_is_finite() is not True]
        if bad:
            raise ValueError(
                f"refusing {c}: expectations are not defined for risks without a finite mean ({', '.join(bad)})"
            )
    lo = min(float(r.support_min) for r in portfolio.risks)
    if not cap > lo:
        raise ValueError(f"cap {cap} must exceed the smallest support point {lo}")
    ends = c(np.array([lo, cap]))
    scale = float(abs(ends[1] - ends[0]))
    theta = np.array(portfolio.weights.weights)

    def job(arg):
        k, size = arg
        draws, _ = _draw(portfolio, seed, k, size)
        draws = np.minimum(draws, cap)
        cd = c(theta @ draws)
        cc = theta @ c(draws)
        diff = cd - cc
        return (cd.sum(), (cd * cd).sum(), cc.sum(), (cc * cc).sum(), diff.sum(), (diff * diff).sum())

    acc = np.zeros(6)
    for part in _run(job, _chunks(samples, chunk), workers):
        acc += np.array(part)
    n = samples
    level = 1.0 - delta
    md, iv_d = _mean_interval(acc[0], acc[1], n, scale, delta, bound)
    mc, iv_c = _mean_interval(acc[2], acc[3], n, scale, delta, bound)
    mdiff, iv_diff = _mean_interval(acc[4], acc[5], n, 2 * scale, delta, bound)
    return ConvexGap(
        c,
        MCEstimate(md, n, bound, level, iv_d, seed),
        MCEstimate(mc, n, bound, level, iv_c, seed),
        MCEstimate(mdiff, n, bound, level, iv_diff, seed),
        cap,
        scale,
    )
