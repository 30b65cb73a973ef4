"""Time-domain LP feedrate optimization.

The path parameter series s(k) is parametrized by B-spline control points and
maximized in sum, subject to monotonicity, endpoint, feedrate, axis
acceleration/jerk and (optionally) linearized contour-error constraints.  The
same formulation covers plain feedrate optimization (identity compensator) and
the combined form with filtered-basis pre-compensation.

Axis positions are nonlinear in s, so they are linearized around per-sample
points s_e(k) taken from an initializing trajectory; difference stencils
replicate the first sample (rest history) so the motion starts from rest.
"""

from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from feedopt.dynamics import DiscreteTransferFunction, lift
from feedopt.errors import InfeasibleError, NumericalError
from feedopt.fbs import Compensator, operator_matrix
from feedopt.geometry import Toolpath
from feedopt.lp import INFEASIBLE, OPTIMAL, LpProblem, LpSolution, solve_lp
from feedopt.splines import KnotVector, basis_matrix
from feedopt.trajgen import KinematicLimits, TrajectoryProfile, profile_from_path

__all__ = ["TimeLpSpec", "TimeLpBuild", "TimeLpResult", "linearize_path",
           "build_time_lp", "solve_time_lp", "relinearize"]

EPS_DONE = 1e-5


@dataclass
class TimeLpSpec:
    path: Toolpath
    limits: KinematicLimits
    sample_time: float
    s_init: np.ndarray
    n_control: int = 40
    degree: int = 5
    include_jerk: bool = True
    ce_limit_um: float | None = None
    models: tuple[DiscreteTransferFunction, DiscreteTransferFunction] | None = None
    compensators: tuple[Compensator, Compensator] | None = None
    eps_done: float = EPS_DONE
    operator_cap: int = 20000
    feasibility_tol: float = 1e-8

    def __post_init__(self):
        self.s_init = np.asarray(self.s_init, dtype=float)
        n = len(self.s_init)
        if n < 4:
            raise ValueError("initializing trajectory too short")
        if np.any(np.diff(self.s_init) < -1e-12):
            raise ValueError("linearization points must be nondecreasing")
        if abs(self.s_init[0]) > 1e-9 or abs(self.s_init[-1] - 1.0) > 1e-9:
            raise ValueError("linearization points must span s=0 to s=1")
        if self.n_control > n:
            raise ValueError("more control points than samples")
        if self.ce_limit_um is not None:
            if self.ce_limit_um <= 0:
                raise ValueError("contour-error limit must be positive")
            if self.models is None:
                raise ValueError("contour-error constraint needs the axis models")
        if self.compensators is not None:
            for comp in self.compensators:
                if comp.n_rows != n:
                    raise ValueError("compensator horizon does not match the trajectory")

    @property
    def n_samples(self) -> int:
        return len(self.s_init)


def linearize_path(path: Toolpath, s_e: np.ndarray):
    """First-order expansion of the axis positions around s_e.

    Returns slopes (a_x, a_y) and intercepts (c_x, c_y) so that the linearized
    command is a_x * s + c_x (exact at s = s_e).
    """
    s_e = np.asarray(s_e, dtype=float)
    a_x, a_y = path.derivs(s_e, 1)
    f_x, f_y = path.eval(s_e)
    return a_x, a_y, f_x - a_x * s_e, f_y - a_y * s_e


def _diff_operator(n: int, order: int) -> sp.csr_matrix:
    """Backward difference with indices below 0 clamped to the first sample."""
    rows, cols, vals = [], [], []
    for k in range(n):
        for j in range(order + 1):
            rows.append(k)
            cols.append(max(k - j, 0))
            vals.append(((-1) ** j) * comb(order, j))
    return sp.csr_matrix(sp.coo_matrix((vals, (rows, cols)), shape=(n, n)))


@dataclass
class TimeLpBuild:
    problem: LpProblem
    basis: np.ndarray
    families: dict[str, slice]
    theta: np.ndarray
    slopes: tuple[np.ndarray, np.ndarray]
    intercepts: tuple[np.ndarray, np.ndarray]
    ce_matrix: np.ndarray | None
    ce_offset: np.ndarray | None


def build_time_lp(spec: TimeLpSpec) -> TimeLpBuild:
    n = spec.n_samples
    ts = spec.sample_time
    length = spec.path.length
    kv = KnotVector.clamped_uniform(spec.n_control, spec.degree)
    basis = basis_matrix(kv, n)

    a_x, a_y, c_x, c_y = linearize_path(spec.path, spec.s_init)
    theta = spec.path.tangent_angle(spec.s_init)

    blocks: list = []
    rhs: list = []
    families: dict[str, slice] = {}
    row_count = 0

    def add(name: str, mats: list, vecs: list):
        nonlocal row_count
        start = row_count
        for m, v in zip(mats, vecs):
            blocks.append(sp.csr_matrix(m))
            rhs.append(np.asarray(v, dtype=float))
            row_count += m.shape[0]
        families[name] = slice(start, row_count)

    forward = sp.diags([-np.ones(n), np.ones(n - 1)], [0, 1], shape=(n - 1, n)).tocsr()
    fwd_basis = forward @ basis
    add("monotonic", [-fwd_basis], [np.zeros(n - 1)])
    add("feedrate", [fwd_basis], [np.full(n - 1, spec.limits.feedrate_mm_s * ts / length)])
    add("bound", [basis], [np.ones(n)])

    basis_x = basis * a_x[:, None]
    basis_y = basis * a_y[:, None]
    d2 = _diff_operator(n, 2)
    accel_lim = spec.limits.accel_mm * ts**2
    mats, vecs = [], []
    for ab, c in ((basis_x, c_x), (basis_y, c_y)):
        m = d2 @ ab
        offset = d2 @ c
        mats += [m, -m]
        vecs += [accel_lim - offset, accel_lim + offset]
    add("accel", mats, vecs)

    if spec.include_jerk:
        d3 = _diff_operator(n, 3)
        jerk_lim = spec.limits.jerk_mm * ts**3
        mats, vecs = [], []
        for ab, c in ((basis_x, c_x), (basis_y, c_y)):
            m = d3 @ ab
            offset = d3 @ c
            mats += [m, -m]
            vecs += [jerk_lim - offset, jerk_lim + offset]
        add("jerk", mats, vecs)

    ce_matrix = ce_offset = None
    if spec.ce_limit_um is not None:
        model_x, model_y = spec.models
        g_x = lift(model_x, n).matrix()
        g_y = lift(model_y, n).matrix()
        if spec.compensators is None:
            resid_x = np.eye(n) - g_x
            resid_y = np.eye(n) - g_y
        else:
            comp_x, comp_y = spec.compensators
            resid_x = np.eye(n) - g_x @ operator_matrix(comp_x, cap=spec.operator_cap)
            resid_y = np.eye(n) - g_y @ operator_matrix(comp_y, cap=spec.operator_cap)
        weight_x = -np.sin(theta)[:, None] * resid_x
        weight_y = np.cos(theta)[:, None] * resid_y
        ce_matrix = weight_x @ basis_x + weight_y @ basis_y
        # deviation from the start point: the machine begins at the path start,
        # so the lifted operators act on command deviations
        x0, y0 = spec.path.eval(0.0)
        ce_offset = weight_x @ (c_x - x0) + weight_y @ (c_y - y0)
        limit_mm = spec.ce_limit_um * 1e-3
        add("contour", [ce_matrix, -ce_matrix],
            [limit_mm - ce_offset, limit_mm + ce_offset])

    a_eq = sp.csr_matrix(np.vstack([basis[0], basis[-1]]))
    problem = LpProblem(
        c=-basis.sum(axis=0),
        a_ub=sp.vstack(blocks).tocsr(),
        b_ub=np.concatenate(rhs),
        a_eq=a_eq,
        b_eq=np.array([0.0, 1.0]),
    )
    return TimeLpBuild(problem=problem, basis=basis, families=families, theta=theta,
                       slopes=(a_x, a_y), intercepts=(c_x, c_y),
                       ce_matrix=ce_matrix, ce_offset=ce_offset)


@dataclass
class TimeLpResult:
    spec: TimeLpSpec
    build: TimeLpBuild
    lp: LpSolution
    control_points: np.ndarray
    s_full: np.ndarray
    x_full: np.ndarray
    y_full: np.ndarray
    x_dm_full: np.ndarray
    y_dm_full: np.ndarray
    cycle_index: int
    cycle_time: float
    profile: TrajectoryProfile
    ce_linear_um: np.ndarray | None = None
    pass_cycle_times: list[float] = field(default_factory=list)


def _diagnose_infeasibility(spec: TimeLpSpec, build: TimeLpBuild) -> str | None:
    """Re-solve with one constraint family removed at a time; the first removal
    that restores feasibility names the binding family."""
    order = [name for name in ("contour", "jerk", "accel", "feedrate")
             if name in build.families]
    a = build.problem.a_ub
    b = build.problem.b_ub
    keep_all = np.ones(a.shape[0], dtype=bool)
    for name in order:
        keep = keep_all.copy()
        keep[build.families[name]] = False
        trial = LpProblem(c=build.problem.c, a_ub=a[keep], b_ub=b[keep],
                          a_eq=build.problem.a_eq, b_eq=build.problem.b_eq)
        if solve_lp(trial, spec.feasibility_tol).status == OPTIMAL:
            return name
    return None


def _extract(spec: TimeLpSpec, build: TimeLpBuild, solution: LpSolution) -> TimeLpResult:
    p = solution.x
    s_raw = build.basis @ p
    s_full = np.clip(np.maximum.accumulate(s_raw), 0.0, 1.0)
    done = np.nonzero(s_full >= 1.0 - spec.eps_done)[0]
    cycle_index = int(done[0]) if len(done) else len(s_full) - 1
    cycle_time = cycle_index * spec.sample_time

    x_full, y_full = spec.path.eval(s_full)
    if spec.compensators is not None:
        from feedopt.fbs import compensate

        comp_x, comp_y = spec.compensators
        x0, y0 = spec.path.eval(0.0)
        x_dm = x0 + compensate(comp_x, x_full - x0)
        y_dm = y0 + compensate(comp_y, y_full - y0)
    else:
        x_dm, y_dm = x_full, y_full

    s_out = s_full[: cycle_index + 1].copy()
    s_out[-1] = 1.0  # terminal snap, displacement below eps_done * path length
    profile = profile_from_path(spec.path, s_out, spec.sample_time, cycle_time,
                                x_dm=x_dm[: cycle_index + 1],
                                y_dm=y_dm[: cycle_index + 1])

    ce_linear = None
    if build.ce_matrix is not None:
        ce_linear = np.abs(build.ce_matrix @ p + build.ce_offset) * 1e3
    return TimeLpResult(spec=spec, build=build, lp=solution, control_points=p,
                        s_full=s_full, x_full=x_full, y_full=y_full,
                        x_dm_full=x_dm, y_dm_full=y_dm,
                        cycle_index=cycle_index, cycle_time=cycle_time,
                        profile=profile, ce_linear_um=ce_linear,
                        pass_cycle_times=[cycle_time])


def solve_time_lp(spec: TimeLpSpec) -> TimeLpResult:
    build = build_time_lp(spec)
    solution = solve_lp(build.problem, spec.feasibility_tol)
    if solution.status == INFEASIBLE:
        family = _diagnose_infeasibility(spec, build)
        hint = f" (binding family: {family})" if family else ""
        raise InfeasibleError(f"time-domain LP infeasible{hint}", family=family)
    if solution.status != OPTIMAL:
        raise NumericalError(f"time-domain LP failed: {solution.status}: {solution.message}")
    return _extract(spec, build, solution)


def relinearize(spec: TimeLpSpec, passes: int = 1) -> TimeLpResult:
    """Repeatedly re-solve with the linearization points set to the previous
    solution.  Stops early and returns the best pass if the cycle time
    increases twice in a row."""
    if passes < 1:
        raise ValueError("passes must be >= 1")
    best = current = solve_time_lp(spec)
    cycle_times = [current.cycle_time]
    worse_streak = 0
    for _ in range(passes - 1):
        next_spec = TimeLpSpec(
            path=spec.path, limits=spec.limits, sample_time=spec.sample_time,
            s_init=current.s_full, n_control=spec.n_control, degree=spec.degree,
            include_jerk=spec.include_jerk, ce_limit_um=spec.ce_limit_um,
            models=spec.models, compensators=spec.compensators,
            eps_done=spec.eps_done, operator_cap=spec.operator_cap,
            feasibility_tol=spec.feasibility_tol,
        )
        current = solve_time_lp(next_spec)
        cycle_times.append(current.cycle_time)
        if current.cycle_time < best.cycle_time:
            best = current
            worse_streak = 0
        else:
            worse_streak += 1
            if worse_streak >= 2:
                break
    best.pass_cycle_times = cycle_times
    return best
