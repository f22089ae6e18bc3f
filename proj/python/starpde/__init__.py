"""Quasilinear parabolic PDE solver on star junctions.

Per-edge quasilinear Dirichlet solves, a vertex-value shooting solver for
the nonlinear junction condition, implicit time stepping, and the a-priori
estimate monitors, all backed by the C++ core.
"""

from ._core import (
    BracketSignError,
    Coefficient,
    CoeffKind,
    CompatibilityReport,
    ConfigurationError,
    EllipticSolution,
    EvaluationError,
    ExpressionParseError,
    TimeDifferenceReport,
    ParabolicSolution,
    ProblemSpec,
    SchemaValidationError,
    SolverError,
    StepDiagnostics,
    ValidationReport,
    barrier_params,
    check_comparison,
    compatibility_check,
    holder_seminorm_t,
    holder_seminorm_x,
    interpolation_bound,
    time_difference_recursion,
    load_problem,
    load_problem_text,
    solve_elliptic,
    solve_parabolic,
    time_difference_bound,
    validate_assumptions,
    __version__,
)

__all__ = [
    "BracketSignError",
    "Coefficient",
    "CoeffKind",
    "CompatibilityReport",
    "ConfigurationError",
    "EllipticSolution",
    "EvaluationError",
    "ExpressionParseError",
    "TimeDifferenceReport",
    "ParabolicSolution",
    "ProblemSpec",
    "SchemaValidationError",
    "SolverError",
    "StepDiagnostics",
    "ValidationReport",
    "barrier_params",
    "check_comparison",
    "compatibility_check",
    "holder_seminorm_t",
    "holder_seminorm_x",
    "interpolation_bound",
    "time_difference_recursion",
    "load_problem",
    "load_problem_text",
    "solve_elliptic",
    "solve_parabolic",
    "time_difference_bound",
    "validate_assumptions",
    "__version__",
]
