"""Monte Carlo solver for the Dirichlet problem on a catalog of bounded domains.

A contracting random walk is run from interior points until it reaches an
epsilon shell of the boundary; averaging the boundary data over the projected
exit points estimates the harmonic extension of that data.  The package also
ships the verification machinery: closed-form solutions, barrier certificates
for boundary regularity, and an independent finite-difference solver.
"""

from .estimator import (
    ConsistencyReport,
    Estimate,
    GridEntry,
    check_coordinate_martingale,
    check_mean_value,
    check_r_independence,
    estimate_grid,
    estimate_point,
)
from .geometry import (
    Annulus,
    AxisBox,
    Ball,
    Domain,
    ExteriorBall,
    HalfspacePolytope,
    PuncturedBall,
)
from .oracle import (
    BarrierSpec,
    BoundaryFunction,
    Constant,
    Coordinate,
    FourierCircle,
    HarmonicPoly2D,
    PiecewiseLabel,
    analytic_solution,
    barrier_value,
    eval_boundary,
    fd_solve,
    regularity_report,
    verify_barrier,
)
from .sampling import RngStream, derive_stream, sample_unit_sphere
from .walk import WalkParams, WalkResult, run_walk, run_walk_block, walk_step

__all__ = [
    "Annulus",
    "AxisBox",
    "Ball",
    "BarrierSpec",
    "BoundaryFunction",
    "ConsistencyReport",
    "Constant",
    "Coordinate",
    "Domain",
    "Estimate",
    "ExteriorBall",
    "FourierCircle",
    "GridEntry",
    "HalfspacePolytope",
    "HarmonicPoly2D",
    "PiecewiseLabel",
    "PuncturedBall",
    "RngStream",
    "WalkParams",
    "WalkResult",
    "analytic_solution",
    "barrier_value",
    "check_coordinate_martingale",
    "check_mean_value",
    "check_r_independence",
    "derive_stream",
    "estimate_grid",
    "estimate_point",
    "eval_boundary",
    "fd_solve",
    "regularity_report",
    "run_walk",
    "run_walk_block",
    "sample_unit_sphere",
    "verify_barrier",
    "walk_step",
]

__version__ = "0.1.0"
