"""Diversification versus concentration for heavy-tailed risks.

Decides, certifies or refutes first-order stochastic dominance of a
diversified portfolio sum(theta_i * X_i) over the concentrated portfolio that
puts everything on one randomly chosen risk.
"""

from .convolve import BoundedSurvival, LatticePMF, brute_force_survival, concentrated_survival, survival_bounds, weighted_sum_pmf
from .dist import (
    ConvexTransform,
    DiscretePareto,
    Frechet1,
    LogHarmonic,
    Pareto,
    RiskDistribution,
    StPetersburg,
    Transformed,
    Trivial,
    apply_transform,
)
from .montecarlo import ConvexTestFunction, MCEstimate, estimate_convex_gap, estimate_diversified_survival, estimate_mixture_survival
from .portfolio import PortfolioSpec, WeightVector, check_onebasket_conditions, global_threshold, region_R, subset_weights
from .subscale import (
    ScalingFactor,
    Status,
    SubscalabilityVerdict,
    check_completely_subscalable,
    check_pointwise,
    check_theta_subscalable,
    r_region,
    t_threshold,
)
from .verify import DominanceStatus, DominanceVerdict, verify_dominance_exact, verify_dominance_mc

__version__ = "0.1.0"

__all__ = [
    "BoundedSurvival",
    "LatticePMF",
    "brute_force_survival",
    "concentrated_survival",
    "survival_bounds",
    "weighted_sum_pmf",
    "ConvexTransform",
    "DiscretePareto",
    "Frechet1",
    "LogHarmonic",
    "Pareto",
    "RiskDistribution",
    "StPetersburg",
    "Transformed",
    "Trivial",
    "apply_transform",
    "ConvexTestFunction",
    "MCEstimate",
    "estimate_convex_gap",
    "estimate_diversified_survival",
    "estimate_mixture_survival",
    "PortfolioSpec",
    "WeightVector",
    "check_onebasket_conditions",
    "global_threshold",
    "region_R",
    "subset_weights",
    "ScalingFactor",
    "Status",
    "SubscalabilityVerdict",
    "check_completely_subscalable",
    "check_pointwise",
    "check_theta_subscalable",
    "r_region",
    "t_threshold",
    "DominanceStatus",
    "DominanceVerdict",
    "verify_dominance_exact",
    "verify_dominance_mc",
]
