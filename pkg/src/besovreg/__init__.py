"""Tikhonov regularization in Besov scales, in the wavelet sequence model."""

from .kernels import BACKEND
from .lab import DiagonalScaleOperator, MatrixOperator, NoisyData, add_noise, make_source
from .planner import (
    PlanError,
    ProblemSignature,
    RegularizationPlan,
    compare_sources,
    feasible_weakened_sources,
    plan_direct,
    plan_optimal,
    plan_weakened,
    sigma_hat,
)
from .solver import (
    PenaltySpec,
    SolveReport,
    bregman_distance,
    check_source_condition,
    penalty_gradient,
    scalar_prox,
    solve_diagonal,
    solve_general,
)
from .spaces import (
    BesovSpace,
    CoefField,
    DyadicIndex,
    besov_norm,
    differential_dimension,
    dual_space,
    embeds,
    level_weight,
    sobolev_norm,
)

__all__ = [
    "BACKEND",
    "DiagonalScaleOperator",
    "MatrixOperator",
    "NoisyData",
    "add_noise",
    "make_source",
    "PlanError",
    "ProblemSignature",
    "RegularizationPlan",
    "compare_sources",
    "feasible_weakened_sources",
    "plan_direct",
    "plan_optimal",
    "plan_weakened",
    "sigma_hat",
    "PenaltySpec",
    "SolveReport",
    "bregman_distance",
    "check_source_condition",
    "penalty_gradient",
    "scalar_prox",
    "solve_diagonal",
    "solve_general",
    "BesovSpace",
    "CoefField",
    "DyadicIndex",
    "besov_norm",
    "differential_dimension",
    "dual_space",
    "embeds",
    "level_weight",
    "sobolev_norm",
]

__version__ = "0.1.0"
