"""Feedrate optimization with servo error pre-compensation for biaxial systems.

The package plans minimum-cycle-time motion along a planar toolpath subject to
feedrate/acceleration/jerk limits and, optionally, a contour-error tolerance
that accounts for the servo dynamics and a filtered-basis feedforward
compensator.  A path-domain LP baseline and trapezoidal-acceleration-profile
(TAP) trajectories are included for comparison, together with a linear servo
simulator, a FastAPI service and a CLI.
"""

from feedopt.contour import ContourResult, estimate_ce, exact_ce
from feedopt.dynamics import (
    DiscreteTransferFunction,
    LiftedOperator,
    condition_rounded_model,
    dc_gain,
    impulse_response,
    lift,
    normalize_dc,
    simulate,
)
from feedopt.errors import (
    ConfigError,
    DegenerateStopError,
    FbsBuildError,
    GeometryError,
    InfeasibleError,
    NumericalError,
)
from feedopt.fbs import Compensator, build_compensator, compensate, operator_matrix
from feedopt.geometry import CirclePath, SplinePath, Toolpath, make_path
from feedopt.lp import LpProblem, LpSolution, solve_lp
from feedopt.opt_path import PathLpSpec, solve_path_lp
from feedopt.opt_time import TimeLpSpec, relinearize, solve_time_lp
from feedopt.splines import KnotVector, basis_matrix, basis_value, derivative_basis_matrix
from feedopt.trajgen import KinematicLimits, SevenSegmentProfile, TrajectoryProfile, tap_profile

__version__ = "0.1.0"

__all__ = [
    "CirclePath",
    "Compensator",
    "ConfigError",
    "ContourResult",
    "DegenerateStopError",
    "DiscreteTransferFunction",
    "FbsBuildError",
    "GeometryError",
    "InfeasibleError",
    "KinematicLimits",
    "KnotVector",
    "LiftedOperator",
    "LpProblem",
    "LpSolution",
    "NumericalError",
    "PathLpSpec",
    "SevenSegmentProfile",
    "SplinePath",
    "TimeLpSpec",
    "Toolpath",
    "TrajectoryProfile",
    "basis_matrix",
    "basis_value",
    "build_compensator",
    "compensate",
    "condition_rounded_model",
    "dc_gain",
    "derivative_basis_matrix",
    "estimate_ce",
    "exact_ce",
    "impulse_response",
    "lift",
    "make_path",
    "normalize_dc",
    "operator_matrix",
    "relinearize",
    "simulate",
    "solve_lp",
    "solve_path_lp",
    "solve_time_lp",
    "tap_profile",
]
