"""Channel scheduling under correlated device activation."""

from ._core import (
    Error,
    ParseError,
    ResourceError,
    ShapeError,
    ValidationError,
    brute_force,
    cluster,
    collision_report,
    coordinate_descent,
    export_lp,
    pairwise_bound,
    quadrature,
    region_radius,
    round_to_hard,
    run_cli,
    simulate,
    solve_exact,
    trace_objective,
    validate_matrix,
)

__all__ = [
    "Error",
    "ParseError",
    "ResourceError",
    "ShapeError",
    "ValidationError",
    "brute_force",
    "cluster",
    "collision_report",
    "coordinate_descent",
    "export_lp",
    "pairwise_bound",
    "quadrature",
    "region_radius",
    "round_to_hard",
    "run_cli",
    "simulate",
    "solve_exact",
    "trace_objective",
    "validate_matrix",
]

__version__ = "0.1.0"
