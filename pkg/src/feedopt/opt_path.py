"""Path-domain LP baseline over q(s) = (ds/dt)^2.

Feedrate and axis acceleration are linear in q and its parametric derivatives;
axis jerk is handled with the pseudo-jerk relaxation, replacing the sqrt(q)
factor with a precomputed upper bound q* (the velocity+acceleration-only
optimum).  Two-phase solve, then time reconstruction and resampling onto the
fixed sample grid.
"""

import time as _time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.interpolate import PchipInterpolator

from feedopt.errors import DegenerateStopError, InfeasibleError, NumericalError
from feedopt.geometry import Toolpath
from feedopt.lp import INFEASIBLE, OPTIMAL, LpProblem, LpSolution, solve_lp
from feedopt.splines import KnotVector, basis_matrix, derivative_basis_matrix
from feedopt.trajgen import KinematicLimits, TrajectoryProfile, profile_from_path

__all__ = ["PathLpSpec", "PathLpResult", "build_path_lp", "solve_path_lp"]

_Q_FLOOR = 1e-12


@dataclass
class PathLpSpec:
    path: Toolpath
    limits: KinematicLimits
    sample_time: float
    n_grid: int = 1001
    n_control: int = 40
    degree: int = 5
    include_jerk: bool = True
    feasibility_tol: float = 1e-8

    def __post_init__(self):
        if self.n_grid < self.n_control:
            raise ValueError("grid must have at least as many points as control points")


@dataclass
class PathLpBuild:
    problem: LpProblem
    basis: np.ndarray
    grid: np.ndarray


def build_path_lp(spec: PathLpSpec, include_jerk: bool,
                  q_star: np.ndarray | None = None) -> PathLpBuild:
    if include_jerk and q_star is None:
        raise ValueError("jerk rows need the precomputed upper bound q*")
    s = np.linspace(0.0, 1.0, spec.n_grid)
    ds = s[1] - s[0]
    kv = KnotVector.clamped_uniform(spec.n_control, spec.degree)
    b0 = basis_matrix(kv, spec.n_grid)
    b1 = derivative_basis_matrix(kv, 1, spec.n_grid)

    x1, y1 = spec.path.derivs(s, 1)
    x2, y2 = spec.path.derivs(s, 2)
    length = spec.path.length

    blocks = [-b0, length**2 * b0]
    rhs = [np.zeros(spec.n_grid), np.full(spec.n_grid, spec.limits.feedrate_mm_s**2)]
    accel = spec.limits.accel_mm
    for d2, d1 in ((x2, x1), (y2, y1)):
        m = d2[:, None] * b0 + 0.5 * d1[:, None] * b1
        blocks += [m, -m]
        rhs += [np.full(spec.n_grid, accel)] * 2

    eq_rows = [b0[0], b0[-1]]
    eq_vals = [0.0, 0.0]
    if include_jerk:
        b2 = derivative_basis_matrix(kv, 2, spec.n_grid)
        x3, y3 = spec.path.derivs(s, 3)
        root_q = np.sqrt(np.maximum(q_star, 0.0))
        mask = root_q > _Q_FLOOR  # the bound is vacuous where q* vanishes
        bound = spec.limits.jerk_mm / root_q[mask]
        for d3, d2, d1 in ((x3, x2, x1), (y3, y2, y1)):
            m = (d3[:, None] * b0 + 1.5 * d2[:, None] * b1 + 0.5 * d1[:, None] * b2)[mask]
            blocks += [m, -m]
            rhs += [bound, bound]
        # jerk-limited rest-to-rest motion must start and end with zero
        # acceleration; without these rows the relaxation lets acceleration
        # jump at the rest points where the pseudo-jerk bound is vacuous
        eq_rows += [b1[0], b1[-1]]
        eq_vals += [0.0, 0.0]

    problem = LpProblem(
        c=-b0.sum(axis=0) * ds,
        a_ub=sp.vstack([sp.csr_matrix(b) for b in blocks]).tocsr(),
        b_ub=np.concatenate(rhs),
        a_eq=sp.csr_matrix(np.vstack(eq_rows)),
        b_eq=np.asarray(eq_vals, dtype=float),
    )
    return PathLpBuild(problem=problem, basis=b0, grid=s)


@dataclass
class PathLpResult:
    spec: PathLpSpec
    q: np.ndarray
    grid: np.ndarray
    cycle_time: float
    profile: TrajectoryProfile
    lp: LpSolution
    q_star: np.ndarray | None
    build: PathLpBuild
    compute_time: float


def _solve_phase(spec: PathLpSpec, include_jerk: bool,
                 q_star: np.ndarray | None) -> tuple[np.ndarray, LpSolution, PathLpBuild]:
    build = build_path_lp(spec, include_jerk, q_star)
    solution = solve_lp(build.problem, spec.feasibility_tol)
    if solution.status == INFEASIBLE:
        raise InfeasibleError("path-domain LP infeasible")
    if solution.status != OPTIMAL:
        raise NumericalError(f"path-domain LP failed: {solution.status}: {solution.message}")
    return np.maximum(build.basis @ solution.x, 0.0), solution, build


def _reconstruct_time(q: np.ndarray, ds: float) -> np.ndarray:
    """Cumulative time over the grid: dt = 2*ds/(sqrt(q_i)+sqrt(q_{i+1})).

    Exact for constant acceleration and finite at rest endpoints; an interior
    interval where both endpoints rest cannot be traversed.
    """
    rq = np.sqrt(q)
    pair = rq[:-1] + rq[1:]
    interior = pair[1:-1] if len(pair) > 2 else pair
    if np.any(interior <= 0):
        raise DegenerateStopError("solution stops on an interior interval")
    if pair[0] <= 0 or pair[-1] <= 0:
        raise DegenerateStopError("solution cannot leave a rest endpoint")
    return np.concatenate([[0.0], np.cumsum(2.0 * ds / pair)])


def solve_path_lp(spec: PathLpSpec) -> PathLpResult:
    started = _time.perf_counter()
    q1, sol1, build1 = _solve_phase(spec, include_jerk=False, q_star=None)
    q_star = None
    q, solution, build = q1, sol1, build1
    if spec.include_jerk:
        q_star = q1
        q, solution, build = _solve_phase(spec, include_jerk=True, q_star=q_star)
    t_nodes = _reconstruct_time(q, build.grid[1] - build.grid[0])
    cycle_time = float(t_nodes[-1])
    compute_time = _time.perf_counter() - started

    s_of_t = PchipInterpolator(t_nodes, build.grid)
    n_out = int(np.ceil(cycle_time / spec.sample_time)) + 1
    t_out = np.minimum(np.arange(n_out) * spec.sample_time, cycle_time)
    s_out = np.clip(s_of_t(t_out), 0.0, 1.0)
    s_out[-1] = 1.0
    profile = profile_from_path(spec.path, s_out, spec.sample_time, cycle_time)
    return PathLpResult(spec=spec, q=q, grid=build.grid, cycle_time=cycle_time,
                        profile=profile, lp=solution, q_star=q_star, build=build,
                        compute_time=compute_time)
