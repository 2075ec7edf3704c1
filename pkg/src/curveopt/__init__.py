"""Constrained optimization via heavy-ball curve search and spectral projected gradient."""

from .curves import (
    CurveDecision,
    HullCoefficients,
    QuadraticCurve,
    feasibility_certificate,
    hull_coefficients,
)
from .problems import SmoothProblem, check_gradient, get_problem, list_problems
from .sets import (
    FEAS_TOL,
    ActiveSetQuery,
    ConvexFeasibleSet,
    active_set,
    make_box,
    make_composite,
    make_ellipsoid,
    make_set,
    make_sphere,
)
from .solvers import (
    RunRecord,
    SolverConfig,
    adaptive_momentum,
    build_secondary_direction,
    curve_search,
    scs_solve,
    spectral_eta,
    spg_direction,
    spg_solve,
    stationarity_measure,
)

__all__ = [
    "ActiveSetQuery",
    "ConvexFeasibleSet",
    "CurveDecision",
    "FEAS_TOL",
    "HullCoefficients",
    "QuadraticCurve",
    "RunRecord",
    "SmoothProblem",
    "SolverConfig",
    "active_set",
    "adaptive_momentum",
    "build_secondary_direction",
    "check_gradient",
    "curve_search",
    "feasibility_certificate",
    "get_problem",
    "hull_coefficients",
    "list_problems",
    "make_box",
    "make_composite",
    "make_ellipsoid",
    "make_set",
    "make_sphere",
    "scs_solve",
    "spectral_eta",
    "spg_direction",
    "spg_solve",
    "stationarity_measure",
]

__version__ = "0.1.0"
