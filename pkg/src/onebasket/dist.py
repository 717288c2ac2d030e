"""Catalog of positive risks: exact survival functions, inverse-transform
samplers and the structural facts the verifiers rely on.

Lattice-exact members (discrete Pareto, St. Petersburg, the trivial risk and
their integer-affine transforms) evaluate their survival function in exact
rational arithmetic when given an exact argument. Everything else works in
binary64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import ClassVar, Iterator

import numpy as np
from scipy.special import lambertw

from ._numbers import fmt, is_exact, to_fraction

__all__ = [
    "Kind",
    "RiskDistribution",
    "Pareto",
    "DiscretePareto",
    "StPetersburg",
    "Frechet1",
    "LogHarmonic",
    "Trivial",
    "Transformed",
    "ConvexTransform",
    "apply_transform",
    "survival",
    "sample",
    "mean_is_finite",
    "from_spec",
    "KINDS",
]


class Kind(Enum):
    PARETO = "pareto"
    DISCRETE_PARETO = "discrete-pareto"
    ST_PETERSBURG = "st-petersburg"
    FRECHET1 = "frechet1"
    LOG_HARMONIC = "log-harmonic"
    TRIVIAL = "trivial"
    TRANSFORMED = "transformed"


def _floor(x) -> int:
    return math.floor(x)


class RiskDistribution:
    """Base class. Subclasses are frozen dataclasses and therefore hashable."""

    kind: ClassVar[Kind]

    # -- survival ---------------------------------------------------------
    def survival(self, x):
        raise NotImplementedError

    def survival_array(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        return np.array([float(self.survival(float(v))) for v in xs.ravel()]).reshape(xs.shape)

    # -- sampling ---------------------------------------------------------
    def quantile(self, u: float):
        """Generalized inverse ``inf{x : F(x) >= u}`` for ``u`` in ``[0, 1)``."""
        raise NotImplementedError

    def quantile_array(self, u: np.ndarray) -> np.ndarray:
        return np.array([float(self.quantile(float(v))) for v in np.ravel(u)])

    def sample(self, rng: np.random.Generator):
        return self.quantile(float(rng.random()))

    def sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.quantile_array(rng.random(size))

    # -- structure --------------------------------------------------------
    @property
    def support_min(self):
        raise NotImplementedError

    @property
    def lattice_exact(self) -> bool:
        return False

    @property
    def integer_valued(self) -> bool:
        return False

    def mean_is_finite(self) -> bool | None:
        raise NotImplementedError

    def critical_points(self, upto: float) -> list[float]:
        """Points in ``[support_min, upto]`` where the survival jumps or kinks."""
        return []

    def breakpoints(self, upto) -> list[Fraction]:
        """Jump points of a lattice-exact survival function, ascending."""
        raise TypeError(f"{self.kind.value} is not lattice-exact")

    def atoms(self, upto) -> Iterator[tuple[Fraction, Fraction]]:
        """``(value, probability)`` pairs with value <= upto, ascending."""
        raise TypeError(f"{self.kind.value} is not lattice-exact")

    def lattice(self) -> tuple[Fraction, Fraction]:
        """``(step, origin)`` with every atom in ``origin + step * Z``."""
        if self.lattice_exact and self.integer_valued:
            return Fraction(1), Fraction(0)
        raise TypeError(f"{self.kind.value} is not lattice-exact")

    def params(self) -> dict:
        return {}

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "params": self.params()}

    def __str__(self) -> str:
        p = ", ".join(f"{k}={v}" for k, v in self.params().items())
        return f"{self.kind.value}({p})"


@dataclass(frozen=True)
class Pareto(RiskDistribution):
    alpha: float
    rho: float = 1.0
    kind: ClassVar[Kind] = Kind.PARETO

    def __post_init__(self):
        if not (self.alpha > 0 and self.rho > 0):
            raise ValueError(f"Pareto needs alpha > 0 and rho > 0, got {self.alpha}, {self.rho}")

    @property
    def support_min(self):
        return self.rho

    def survival(self, x):
        x = float(x)
        if x < self.rho:
            return 1.0
        return (self.rho / x) ** self.alpha

    def survival_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        with np.errstate(divide="ignore"):
            out = (self.rho / np.maximum(xs, self.rho)) ** self.alpha
        return np.where(xs < self.rho, 1.0, out)

    def quantile(self, u):
        return self.rho * (1.0 - u) ** (-1.0 / self.alpha)

    def quantile_array(self, u):
        return self.rho * (1.0 - np.asarray(u)) ** (-1.0 / self.alpha)

    def mean_is_finite(self):
        return self.alpha > 1

    def critical_points(self, upto):
        return [self.rho] if self.rho <= upto else []

    def params(self):
        return {"alpha": self.alpha, "rho": self.rho}


@dataclass(frozen=True)
class DiscretePareto(RiskDistribution):
    """Shifted discrete Pareto on {0, 1, 2, ...}: P(X > x) = 1/(floor(x) + 2)."""

    kind: ClassVar[Kind] = Kind.DISCRETE_PARETO

    @property
    def support_min(self):
        return 0

    @property
    def lattice_exact(self):
        return True

    @property
    def integer_valued(self):
        return True

    def survival(self, x):
        if is_exact(x):
            return Fraction(1) if x < 0 else Fraction(1, _floor(x) + 2)
        x = float(x)
        if x < 0:
            return 1.0
        if math.isinf(x):
            return 0.0
        return 1.0 / (math.floor(x) + 2)

    def survival_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = 1.0 / (np.floor(np.maximum(xs, 0.0)) + 2.0)
        return np.where(xs < 0, 1.0, out)

    @staticmethod
    def pmf(k: int) -> Fraction:
        return Fraction(1, (k + 1) * (k + 2)) if k >= 0 else Fraction(0)

    def quantile(self, u):
        return max(0, math.ceil(1.0 / (1.0 - u) - 2.0))

    def quantile_array(self, u):
        return np.maximum(0.0, np.ceil(1.0 / (1.0 - np.asarray(u)) - 2.0))

    def mean_is_finite(self):
        return False

    def critical_points(self, upto):
        return [float(k) for k in range(0, _floor(upto) + 1)] if upto >= 0 else []

    def breakpoints(self, upto):
        if upto < 0:
            return []
        return [Fraction(k) for k in range(0, _floor(upto) + 1)]

    def atoms(self, upto):
        if upto < 0:
            return
        for k in range(0, _floor(upto) + 1):
            yield Fraction(k), self.pmf(k)


@dataclass(frozen=True)
class StPetersburg(RiskDistribution):
    """Payoff 2^m with probability 2^-m, m >= 1."""

    kind: ClassVar[Kind] = Kind.ST_PETERSBURG

    @property
    def support_min(self):
        return 2

    @property
    def lattice_exact(self):
        return True

    @property
    def integer_valued(self):
        return True

    @staticmethod
    def _exponent(x) -> int:
        # floor(log2 x) for x >= 1, without floating logs
        return _floor(x).bit_length() - 1

    def survival(self, x):
        if is_exact(x):
            return Fraction(1) if x < 2 else Fraction(1, 2 ** self._exponent(x))
        x = float(x)
        if x < 2:
            return 1.0
        if math.isinf(x):
            return 0.0
        return 2.0 ** -self._exponent(x)

    def survival_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        _, e = np.frexp(np.floor(np.maximum(xs, 2.0)))
        return np.where(xs < 2, 1.0, np.ldexp(1.0, 1 - e))

    def quantile(self, u):
        _, e = math.frexp(1.0 - u)
        return 2 ** max(1, 1 - e)

    def quantile_array(self, u):
        _, e = np.frexp(1.0 - np.asarray(u))
        return np.ldexp(1.0, np.maximum(1, 1 - e))

    def mean_is_finite(self):
        return False

    def critical_points(self, upto):
        out, v = [], 2
        while v <= upto:
            out.append(float(v))
            v *= 2
        return out

    def breakpoints(self, upto):
        return [Fraction(v) for v in self.critical_points(upto)]

    def atoms(self, upto):
        m = 1
        while 2**m <= upto:
            yield Fraction(2**m), Fraction(1, 2**m)
            m += 1


@dataclass(frozen=True)
class Frechet1(RiskDistribution):
    """Frechet(1): P(X > x) = 1 - exp(-1/x) for x > 0, and 1 at x = 0."""

    kind: ClassVar[Kind] = Kind.FRECHET1

    @property
    def support_min(self):
        return 0

    def survival(self, x):
        x = float(x)
        if x <= 0:
            return 1.0
        return -math.expm1(-1.0 / x)

    def survival_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        with np.errstate(divide="ignore"):
            out = -np.expm1(-1.0 / np.where(xs > 0, xs, 1.0))
        return np.where(xs <= 0, 1.0, out)

    def quantile(self, u):
        if u <= 0:
            return 0.0
        return -1.0 / math.log(u)

    def quantile_array(self, u):
        u = np.asarray(u)
        with np.errstate(divide="ignore"):
            return np.where(u > 0, -1.0 / np.log(np.where(u > 0, u, 0.5)), 0.0)

    def mean_is_finite(self):
        return False


@dataclass(frozen=True)
class LogHarmonic(RiskDistribution):
    """P(X > x) = 1 for x < e and 1/(x ln x) beyond: infinite mean, never subscalable."""

    kind: ClassVar[Kind] = Kind.LOG_HARMONIC

    @property
    def support_min(self):
        return math.e

    def survival(self, x):
        x = float(x)
        if x < math.e:
            return 1.0
        return 1.0 / (x * math.log(x))

    def survival_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        safe = np.maximum(xs, math.e)
        return np.where(xs < math.e, 1.0, 1.0 / (safe * np.log(safe)))

    def quantile(self, u):
        s = 1.0 - u
        if s >= 1.0 / math.e:
            return math.e
        y = 1.0 / s
        return y / lambertw(y).real

    def quantile_array(self, u):
        s = 1.0 - np.asarray(u, dtype=float)
        y = 1.0 / np.minimum(s, 1.0 / math.e)
        x = y / lambertw(y).real
        return np.where(s >= 1.0 / math.e, math.e, x)

    def mean_is_finite(self):
        return False

    def critical_points(self, upto):
        return [math.e] if math.e <= upto else []


@dataclass(frozen=True)
class Trivial(RiskDistribution):
    """The almost surely zero risk."""

    kind: ClassVar[Kind] = Kind.TRIVIAL

    @property
    def support_min(self):
        return 0

    @property
    def lattice_exact(self):
        return True

    @property
    def integer_valued(self):
        return True

    def survival(self, x):
        if is_exact(x):
            return Fraction(1) if x < 0 else Fraction(0)
        return 1.0 if float(x) < 0 else 0.0

    def survival_array(self, xs):
        return np.where(np.asarray(xs, dtype=float) < 0, 1.0, 0.0)

    def quantile(self, u):
        return 0

    def quantile_array(self, u):
        return np.zeros(np.shape(u))

    def mean_is_finite(self):
        return True

    def critical_points(self, upto):
        return [0.0] if upto >= 0 else []

    def breakpoints(self, upto):
        return [Fraction(0)] if upto >= 0 else []

    def atoms(self, upto):
        if upto >= 0:
            yield Fraction(0), Fraction(1)


# ---------------------------------------------------------------------------
# increasing convex transforms


@dataclass(frozen=True)
class ConvexTransform:
    """Increasing convex map ``g``.

    ``affine``: g(x) = slope * x + shift (exact rationals).
    ``exp``: g(x) = exp(x) + offset; ``offset = -1`` is anchored.
    ``piecewise``: linear interpolation of ``points`` with the end slopes
    extended to both sides.
    """

    form: str
    slope: Fraction = Fraction(1)
    shift: Fraction = Fraction(0)
    offset: float = -1.0
    points: tuple[tuple[Fraction, Fraction], ...] = ()
    _slopes: tuple[Fraction, ...] = field(default=(), repr=False, compare=False)

    def __post_init__(self):
        if self.form == "affine":
            object.__setattr__(self, "slope", to_fraction(self.slope))
            object.__setattr__(self, "shift", to_fraction(self.shift))
            if self.slope < 0:
                raise ValueError("transform must be increasing (slope >= 0)")
        elif self.form == "exp":
            object.__setattr__(self, "offset", float(self.offset))
        elif self.form == "piecewise":
            pts = tuple((to_fraction(a), to_fraction(b)) for a, b in self.points)
            if len(pts) < 2:
                raise ValueError("piecewise transform needs at least two breakpoints")
            xs = [p[0] for p in pts]
            if any(b <= a for a, b in zip(xs, xs[1:])):
                raise ValueError("breakpoints must be strictly increasing in x")
            slopes = tuple((y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(pts, pts[1:]))
            if slopes[0] < 0:
                raise ValueError("transform must be increasing (all slopes >= 0)")
            if any(b < a for a, b in zip(slopes, slopes[1:])):
                raise ValueError("transform must be convex (slopes non-decreasing)")
            object.__setattr__(self, "points", pts)
            object.__setattr__(self, "_slopes", slopes)
        else:
            raise ValueError(f"unknown transform form {self.form!r}")

    # constructors
    @classmethod
    def identity(cls) -> ConvexTransform:
        return cls("affine")

    @classmethod
    def shift_by(cls, a) -> ConvexTransform:
        return cls("affine", shift=to_fraction(a))

    @classmethod
    def affine(cls, slope, shift=0) -> ConvexTransform:
        return cls("affine", slope=to_fraction(slope), shift=to_fraction(shift))

    @classmethod
    def exp(cls, offset: float = -1.0) -> ConvexTransform:
        return cls("exp", offset=offset)

    @classmethod
    def piecewise(cls, points) -> ConvexTransform:
        return cls("piecewise", points=tuple(tuple(p) for p in points))

    # properties
    @property
    def is_identity(self) -> bool:
        return self.form == "affine" and self.slope == 1 and self.shift == 0

    @property
    def anchored(self) -> bool:
        return self(Fraction(0)) == 0

    @property
    def rational_affine(self) -> bool:
        return self.form == "affine" and self.slope > 0

    @property
    def integer_affine(self) -> bool:
        return (
            self.rational_affine
            and self.slope.denominator == 1
            and self.shift.denominator == 1
        )

    @property
    def eventual_slope(self):
        if self.form == "affine":
            return self.slope
        if self.form == "piecewise":
            return self._slopes[-1]
        return math.inf

    def __call__(self, x):
        if isinstance(x, np.ndarray):
            return self._call_array(x)
        if self.form == "affine":
            if is_exact(x):
                return self.slope * x + self.shift
            return float(self.slope) * float(x) + float(self.shift)
        if self.form == "exp":
            if is_exact(x) and x == 0 and self.offset == -1.0:
                return Fraction(0)
            return math.exp(float(x)) + self.offset
        return self._piecewise(x)

    def _call_array(self, x):
        if self.form == "affine":
            return float(self.slope) * x + float(self.shift)
        if self.form == "exp":
            with np.errstate(over="ignore"):
                return np.exp(x) + self.offset
        xs = np.array([float(p[0]) for p in self.points])
        ys = np.array([float(p[1]) for p in self.points])
        s0, s1 = float(self._slopes[0]), float(self._slopes[-1])
        out = np.interp(x, xs, ys)
        out = np.where(x < xs[0], ys[0] + s0 * (x - xs[0]), out)
        return np.where(x > xs[-1], ys[-1] + s1 * (x - xs[-1]), out)

    def _piecewise(self, x):
        exact = is_exact(x)
        pts = self.points if exact else [(float(a), float(b)) for a, b in self.points]
        slopes = self._slopes if exact else [float(s) for s in self._slopes]
        if not exact:
            x = float(x)
        if x <= pts[0][0]:
            return pts[0][1] + slopes[0] * (x - pts[0][0])
        for (x0, y0), (x1, _), s in zip(pts, pts[1:], slopes):
            if x <= x1:
                return y0 + s * (x - x0)
        return pts[-1][1] + slopes[-1] * (x - pts[-1][0])

    def inverse(self, y):
        """Right-continuous generalized inverse ``sup{t : g(t) <= y}``.

        Returns ``-inf``/``inf`` (floats) when the set is empty/unbounded.
        """
        if self.form == "affine":
            if self.slope == 0:
                return math.inf if y >= self.shift else -math.inf
            if is_exact(y):
                return (y - self.shift) / self.slope
            return (float(y) - float(self.shift)) / float(self.slope)
        if self.form == "exp":
            d = float(y) - self.offset
            return math.log(d) if d > 0 else -math.inf
        exact = is_exact(y)
        pts = self.points if exact else [(float(a), float(b)) for a, b in self.points]
        slopes = list(self._slopes) if exact else [float(s) for s in self._slopes]
        if not exact:
            y = float(y)
        # slope to the right of each breakpoint
        right = slopes + [slopes[-1]]
        if slopes[-1] == 0 and y >= pts[-1][1]:
            return math.inf
        if y < pts[0][1]:
            if slopes[0] == 0:
                return -math.inf
            return pts[0][0] + (y - pts[0][1]) / slopes[0]
        k = max(i for i, (_, yi) in enumerate(pts) if yi <= y)
        return pts[k][0] + (y - pts[k][1]) / right[k]

    def kinks(self) -> list[float]:
        return [float(p[0]) for p in self.points] if self.form == "piecewise" else []

    def to_dict(self) -> dict:
        if self.form == "affine":
            return {"kind": "affine", "slope": fmt(self.slope), "shift": fmt(self.shift)}
        if self.form == "exp":
            return {"kind": "exp", "offset": self.offset}
        return {"kind": "piecewise", "points": [[fmt(a), fmt(b)] for a, b in self.points]}


@dataclass(frozen=True)
class Transformed(RiskDistribution):
    """Distribution of ``g(X)`` for an increasing convex ``g``."""

    base: RiskDistribution
    g: ConvexTransform
    kind: ClassVar[Kind] = Kind.TRANSFORMED

    @property
    def support_min(self):
        return self.g(self.base.support_min)

    @property
    def lattice_exact(self):
        return self.base.lattice_exact and self.g.rational_affine

    @property
    def integer_valued(self):
        return self.base.integer_valued and self.g.integer_affine

    def survival(self, x):
        exact = self.lattice_exact and is_exact(x)
        t = self.g.inverse(x)
        if isinstance(t, float) and math.isinf(t):
            one, zero = (Fraction(1), Fraction(0)) if exact else (1.0, 0.0)
            return one if t < 0 else zero
        return self.base.survival(t)

    def survival_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        if self.g.form == "affine" and self.g.slope > 0:
            return self.base.survival_array((xs - float(self.g.shift)) / float(self.g.slope))
        if self.g.form == "exp":
            d = xs - self.g.offset
            with np.errstate(divide="ignore", invalid="ignore"):
                t = np.where(d > 0, np.log(np.where(d > 0, d, 1.0)), -np.inf)
            out = self.base.survival_array(np.where(np.isfinite(t), t, 0.0))
            return np.where(np.isfinite(t), out, 1.0)
        return super().survival_array(xs)

    def quantile(self, u):
        return self.g(self.base.quantile(u))

    def quantile_array(self, u):
        return self.g(np.asarray(self.base.quantile_array(u), dtype=float))

    def mean_is_finite(self):
        base = self.base.mean_is_finite()
        slope = self.g.eventual_slope
        if slope == 0:
            return True
        if base is False:
            # g grows at least linearly, so an infinite mean survives
            return False
        if self.g.form == "exp":
            return None
        return base

    def critical_points(self, upto):
        lim = self.g.inverse(upto)
        pts = []
        if not (isinstance(lim, float) and math.isinf(lim) and lim < 0):
            bound = lim if not math.isinf(float(lim)) else 1e300
            pts = [float(self.g(p)) for p in self.base.critical_points(float(bound))]
        pts += [float(self.g(k)) for k in self.g.kinks()]
        return sorted({p for p in pts if p <= upto})

    def breakpoints(self, upto):
        if not self.lattice_exact:
            raise TypeError("transformed risk is not lattice-exact")
        lim = self.g.inverse(to_fraction(upto))
        return [self.g(b) for b in self.base.breakpoints(lim)]

    def atoms(self, upto):
        if not self.lattice_exact:
            raise TypeError("transformed risk is not lattice-exact")
        lim = self.g.inverse(to_fraction(upto))
        for v, p in self.base.atoms(lim):
            yield self.g(v), p

    def lattice(self):
        if not self.lattice_exact:
            raise TypeError("transformed risk is not lattice-exact")
        step, origin = self.base.lattice()
        return self.g.slope * step, self.g(origin)

    def params(self):
        return {"base": self.base.to_dict(), "transform": self.g.to_dict()}

    def to_dict(self):
        d = self.base.to_dict()
        d["transform"] = self.g.to_dict()
        return d

    def __str__(self):
        return f"{self.base}∘{self.g.to_dict()}"


def apply_transform(dist: RiskDistribution, g: ConvexTransform, require_anchored: bool = False) -> RiskDistribution:
    """Distribution of ``g(X)``; the identity map returns ``dist`` unchanged."""
    if require_anchored and not g.anchored:
        raise ValueError("transform must satisfy g(0) = 0 for subscalability claims")
    if g.is_identity:
        return dist
    return Transformed(dist, g)


# module-level conveniences mirroring the operation names


def survival(dist: RiskDistribution, x):
    return dist.survival(x)


def sample(dist: RiskDistribution, rng: np.random.Generator):
    return dist.sample(rng)


def mean_is_finite(dist: RiskDistribution) -> bool | None:
    return dist.mean_is_finite()


# ---------------------------------------------------------------------------
# spec-file ingestion

KINDS = {
    "pareto": Pareto,
    "discrete-pareto": DiscretePareto,
    "st-petersburg": StPetersburg,
    "frechet1": Frechet1,
    "log-harmonic": LogHarmonic,
    "trivial": Trivial,
}

_ALIASES = {
    "discrete_pareto": "discrete-pareto",
    "discretepareto": "discrete-pareto",
    "st_petersburg": "st-petersburg",
    "stpetersburg": "st-petersburg",
    "frechet": "frechet1",
    "log_harmonic": "log-harmonic",
    "logharmonic": "log-harmonic",
}


def transform_from_spec(spec: dict) -> ConvexTransform:
    kind = spec.get("kind")
    if kind in ("identity", None):
        return ConvexTransform.identity()
    if kind == "shift":
        return ConvexTransform.shift_by(spec["a"])
    if kind == "affine":
        return ConvexTransform.affine(spec.get("slope", 1), spec.get("shift", 0))
    if kind == "exp":
        return ConvexTransform.exp(spec.get("offset", -1.0))
    if kind == "piecewise":
        return ConvexTransform.piecewise(spec["points"])
    raise ValueError(f"unknown transform kind {kind!r}; supported: identity, shift, affine, exp, piecewise")


def from_spec(spec: dict) -> RiskDistribution:
    """Build a risk from ``{"kind": ..., "params": {...}, "transform": {...}}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError("risk entry must be an object with a 'kind' field")
    name = str(spec["kind"]).lower()
    name = _ALIASES.get(name, name)
    if name not in KINDS:
        raise ValueError(f"unknown kind {spec['kind']!r}; supported kinds: {', '.join(KINDS)}")
    params = dict(spec.get("params") or {})
    cls = KINDS[name]
    if cls is Pareto:
        dist = Pareto(float(params.get("alpha", 1.0)), float(params.get("rho", 1.0)))
    else:
        if params:
            raise ValueError(f"{name} takes no parameters, got {sorted(params)}")
        dist = cls()
    if spec.get("transform"):
        dist = apply_transform(dist, transform_from_spec(spec["transform"]))
    return dist
