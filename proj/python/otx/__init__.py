"""Entropic optimal transport via accelerated primal-dual coordinate descent."""

from ._otx import (
    OtxError,
    approximate_ot,
    barycenter,
    competitive_ratio,
    consensus_residual,
    dual_value,
    full_gradient,
    grid_cost,
    laplacian,
    line_cost,
    monotone_coupling,
    normalize,
    primal_map,
    round_to_polytope,
    solve,
    theta_schedule,
)

__all__ = [
    "OtxError",
    "approximate_ot",
    "barycenter",
    "competitive_ratio",
    "consensus_residual",
    "dual_value",
    "full_gradient",
    "grid_cost",
    "laplacian",
    "line_cost",
    "monotone_coupling",
    "normalize",
    "primal_map",
    "round_to_polytope",
    "solve",
    "theta_schedule",
]
