"""Exact distribution of sum(theta_i * X_i) for lattice-valued risks.

Everything here is rational arithmetic. Each marginal is truncated at
``truncate_at`` (the mass above it is tracked as ``tail_mass``) and, when a
``max_x`` is given, only the part of the sum at or below ``max_x`` is
resolved atom by atom; the rest is kept as a single ``overflow_mass``. That
is enough to answer survival queries for every ``x <= max_x`` with rigorous
two-sided bounds.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from ._numbers import is_exact, to_fraction
from .dist import RiskDistribution
from .portfolio import PortfolioSpec, WeightVector

BRUTE_MAX_N = 4
BRUTE_MAX_T = 1000


@dataclass(frozen=True)
class BoundedSurvival:
    """``lower <= P(S > x) <= upper``; ``exact`` means ``upper`` is the true value."""

    lower: Fraction
    upper: Fraction
    exact: bool = False

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def value(self) -> Optional[Fraction]:
        return self.upper if self.exact or self.width == 0 else None

    def contains(self, p) -> bool:
        return self.lower <= p <= self.upper


@dataclass
class LatticePMF:
    """Atoms on the lattice ``Z / q`` keyed by integer index.

    ``atoms[k]`` is ``P(S = k/q, all X_i <= T)`` for ``k <= index_cap``;
    ``overflow_mass`` is ``P(S > index_cap/q, all X_i <= T)`` and
    ``tail_mass`` is ``P(some X_i > T)``. When ``x < exact_below`` every
    outcome in the tail has ``S > x``.
    """

    q: int
    atoms: dict[int, Fraction]
    tail_mass: Fraction
    overflow_mass: Fraction = Fraction(0)
    index_cap: Optional[int] = None
    exact_below: Optional[Fraction] = None
    _keys: list[int] = field(default_factory=list, repr=False)
    _suffix: list[Fraction] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self._keys = sorted(self.atoms)
        suffix = [Fraction(0)] * (len(self._keys) + 1)
        for j in range(len(self._keys) - 1, -1, -1):
            suffix[j] = suffix[j + 1] + self.atoms[self._keys[j]]
        self._suffix = suffix

    @property
    def scale_denominator(self) -> int:
        return self.q

    @property
    def total_mass(self) -> Fraction:
        return self._suffix[0] + self.overflow_mass + self.tail_mass

    @property
    def max_x(self) -> Optional[Fraction]:
        return None if self.index_cap is None else Fraction(self.index_cap, self.q)

    def mass_above(self, k: int) -> Fraction:
        """Resolved atom mass strictly above index ``k``."""
        j = bisect.bisect_right(self._keys, k)
        return self._suffix[j]

    def values(self):
        for k in self._keys:
            yield Fraction(k, self.q), self.atoms[k]

    def to_csv(self, path_or_file) -> None:
        own = isinstance(path_or_file, str)
        fh = open(path_or_file, "w", newline="") if own else path_or_file
        try:
            w = csv.writer(fh)
            w.writerow(["index", "value", "numerator", "denominator"])
            for k in self._keys:
                p = self.atoms[k]
                w.writerow([k, float(Fraction(k, self.q)), p.numerator, p.denominator])
        finally:
            if own:
                fh.close()


def _lcm(values) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _exact_weights(weights) -> list[Fraction]:
    if isinstance(weights, WeightVector):
        if weights.exact is None:
            raise ValueError("exact convolution needs rational weights")
        return list(weights.exact)
    out = []
    for w in weights:
        if isinstance(w, float):
            raise ValueError("exact convolution needs rational weights, not binary64")
        out.append(to_fraction(w))
    return out


def _check_lattice(risks):
    for r in risks:
        if not r.lattice_exact:
            raise ValueError(f"{r} is not lattice-exact; use the Monte Carlo engine")


def lattice_scale(risks: Sequence[RiskDistribution], weights) -> int:
    """Smallest q such that every theta_i * X_i lives on Z / q."""
    ws = _exact_weights(weights)
    dens = []
    for r, w in zip(risks, ws):
        step, origin = r.lattice()
        dens += [(w * step).denominator, (w * origin).denominator]
    return _lcm(dens)


def _next_atom_above(r: RiskDistribution, t: Fraction) -> Fraction:
    """A lower bound on the smallest atom of ``r`` strictly above ``t``."""
    step, origin = r.lattice()
    k = math.floor((t - origin) / step) + 1
    return max(origin + step * k, to_fraction(r.support_min))


def _convolve(a: dict[int, Fraction], b: dict[int, Fraction], cap: Optional[int]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    bk = sorted(b.items())
    for i, p in a.items():
        for j, r in bk:
            s = i + j
            if cap is not None and s > cap:
                break
            out[s] = out.get(s, 0) + p * r
    return out


def weighted_sum_pmf(risks: Sequence[RiskDistribution], weights, truncate_at: int, max_x=None) -> LatticePMF:
    """Law of ``sum(theta_i * X_i)`` on ``{all X_i <= truncate_at}``.

    With ``max_x`` only atoms at or below ``max_x`` are kept; the remaining
    truncated mass goes to ``overflow_mass``.
    """
    risks = list(risks)
    ws = _exact_weights(weights)
    if len(risks) != len(ws):
        raise ValueError("risks and weights differ in length")
    _check_lattice(risks)
    if any(w <= 0 for w in ws):
        raise ValueError("weights must be positive")
    T = to_fraction(truncate_at)
    q = lattice_scale(risks, ws)

    mins = [int(w * to_fraction(r.support_min) * q) for r, w in zip(risks, ws)]
    offset = sum(mins)
    cap_rel = None
    index_cap = None
    if max_x is not None:
        index_cap = math.floor(to_fraction(max_x) * q)
        cap_rel = index_cap - offset

    marginals = []
    kept = Fraction(1)
    for r, w, m in zip(risks, ws, mins):
        mass = 1 - r.survival(T)
        kept *= mass
        upto = T
        if cap_rel is not None:
            upto = min(T, Fraction(max(cap_rel, -1) + m, 1) / (w * q))
        pm: dict[int, Fraction] = {}
        for v, p in r.atoms(upto):
            k = int(w * v * q) - m
            if k < 0 or (cap_rel is not None and k > cap_rel):
                continue
            pm[k] = pm.get(k, 0) + p
        marginals.append(pm)

    marginals.sort(key=len)
    acc = marginals[0]
    for pm in marginals[1:]:
        acc = _convolve(acc, pm, cap_rel)
    atoms = {k + offset: p for k, p in acc.items() if p}
    head = sum(atoms.values(), Fraction(0))
    overflow = kept - head if index_cap is not None else Fraction(0)

    # smallest sum reachable once some marginal exceeds T
    exact_below = None
    for i, (r, w) in enumerate(zip(risks, ws)):
        v = w * _next_atom_above(r, T) + sum(
            wj * to_fraction(rj.support_min) for j, (rj, wj) in enumerate(zip(risks, ws)) if j != i
        )
        exact_below = v if exact_below is None else min(exact_below, v)
    return LatticePMF(q, atoms, 1 - kept, overflow, index_cap, exact_below)


def survival_bounds(pmf: LatticePMF, x) -> BoundedSurvival:
    """Enclosure of ``P(S > x)``."""
    x = to_fraction(x)
    k = math.floor(x * pmf.q)
    if pmf.index_cap is not None and k > pmf.index_cap:
        raise ValueError(f"x = {x} lies beyond the resolved range max_x = {pmf.max_x}")
    lower = pmf.mass_above(k) + pmf.overflow_mass
    exact = pmf.exact_below is not None and x < pmf.exact_below
    return BoundedSurvival(lower, lower + pmf.tail_mass, exact)


def concentrated_survival(portfolio: PortfolioSpec, x):
    """``sum(theta_i * F_i(x))``, exact when every piece is rational."""
    w = portfolio.weights
    exact = w.exact is not None and is_exact(x) and all(r.lattice_exact for r in portfolio.risks)
    if exact:
        return sum((t * r.survival(x) for t, r in zip(w.exact, portfolio.risks)), Fraction(0))
    return sum(t * float(r.survival(float(x))) for t, r in zip(w.weights, portfolio.risks))


def brute_force_survival(portfolio: PortfolioSpec, x, truncate_at: int) -> BoundedSurvival:
    """Independent oracle: nested enumeration over the truncated joint support.

    The innermost risk is summed in closed form from its survival function.
    """
    n = portfolio.n
    if n > BRUTE_MAX_N or truncate_at > BRUTE_MAX_T:
        raise ValueError(f"brute force limited to n <= {BRUTE_MAX_N}, truncate_at <= {BRUTE_MAX_T}")
    risks = list(portfolio.risks)
    _check_lattice(risks)
    ws = _exact_weights(portfolio.weights)
    x = to_fraction(x)
    T = to_fraction(truncate_at)
    supports = [list(r.atoms(T)) for r in risks[:-1]]
    mins = [ws[i] * to_fraction(risks[i].support_min) for i in range(n)]
    last, wl = risks[-1], ws[-1]

    def cdf_last(y):
        # P(X_n <= y, X_n <= T)
        return 1 - last.survival(min(y, T))

    def below(i: int, partial: Fraction) -> Fraction:
        """P(partial + sum_{j>=i} theta_j X_j <= x, X_j <= T for j >= i)."""
        if i == n - 1:
            return cdf_last((x - partial) / wl)
        rest = sum(mins[i + 1 :], Fraction(0))
        total = Fraction(0)
        for v, p in supports[i]:
            s = partial + ws[i] * v
            if s + rest > x:
                break
            total += p * below(i + 1, s)
        return total

    kept = Fraction(1)
    for r in risks:
        kept *= 1 - r.survival(T)
    lower = kept - below(0, Fraction(0))
    tail = 1 - kept
    # any outcome with some X_i > T has S >= the bound below
    bound = min(
        ws[i] * (T + 1 if risks[i].integer_valued else T) + sum(mins) - mins[i] for i in range(n)
    )
    exact = x < bound and all(r.integer_valued for r in risks)
    return BoundedSurvival(lower, lower + tail, exact)
