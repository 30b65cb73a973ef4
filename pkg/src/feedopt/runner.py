"""Experiment orchestration: run one algorithm, compare suites, simulate.

This is the layer the service exposes; the CLI talks to the service.  Every
run produces a trimmed trajectory profile, estimated and exact contour-error
series, and a summary whose max fields are the maxima of the emitted series.
"""

import time as _time
from dataclasses import dataclass

import numpy as np

from feedopt.config import ExperimentConfig
from feedopt.contour import ContourResult, estimate_ce, exact_ce
from feedopt.dynamics import DiscreteTransferFunction, dc_gain, simulate
from feedopt.errors import ConfigError
from feedopt.fbs import build_compensator
from feedopt.geometry import Toolpath
from feedopt.opt_path import PathLpSpec, solve_path_lp
from feedopt.opt_time import TimeLpSpec, relinearize
from feedopt.trajgen import TrajectoryProfile, profile_from_path, tap_profile

__all__ = ["RunResult", "run_algorithm", "compare_suite", "simulate_trajectory", "model_info"]


@dataclass
class RunResult:
    algorithm: str
    profile: TrajectoryProfile
    contour: ContourResult
    cycle_time: float
    compute_time: float
    ce_linear_max_um: float | None
    lp_max_violation: float | None
    pass_cycle_times: list[float]

    @property
    def summary(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "cycle_time_s": self.cycle_time,
            "compute_time_s": self.compute_time,
            "max_ce_estimated_um": self.contour.max_estimated_um,
            "max_ce_simulated_um": self.contour.max_exact_um,
            "ce_linear_max_um": self.ce_linear_max_um,
            "lp_max_violation": self.lp_max_violation,
        }


def _simulate_axes(models, path: Toolpath, x_cmd, y_cmd, x_in, y_in):
    """Servo response and tracking errors, rest-at-start convention."""
    tf_x, tf_y = models
    x0, y0 = path.eval(0.0)
    x_out = x0 + simulate(tf_x, np.asarray(x_in) - x0)
    y_out = y0 + simulate(tf_y, np.asarray(y_in) - y0)
    return x_out, y_out, x_cmd - x_out, y_cmd - y_out


def _contour_result(path, models, s_full, x_cmd, y_cmd, x_in, y_in,
                    trim: int) -> ContourResult:
    x_out, y_out, e_x, e_y = _simulate_axes(models, path, x_cmd, y_cmd, x_in, y_in)
    theta = path.tangent_angle(np.clip(s_full, 0.0, 1.0))
    est_um = estimate_ce(e_x, e_y, theta) * 1e3
    exact_um = exact_ce(np.column_stack([x_out, y_out]), path) * 1e3
    return ContourResult(estimated_um=est_um[: trim + 1], exact_um=exact_um[: trim + 1])


def _init_series(cfg: ExperimentConfig, run) -> np.ndarray:
    init_name = run.init_limits or run.limits
    limits = cfg.limit_set(init_name)
    if not run.init_jerk_limited:
        # acceleration-only initializer: push the jerk limit out of the way
        from feedopt.trajgen import KinematicLimits

        limits = KinematicLimits(limits.feedrate_mm_s, limits.accel_m_s2, 1e9)
    s_init, _ = tap_profile(cfg.build_path().length, limits, cfg.sample_time_s,
                            tail_fraction=run.tail_fraction)
    return s_init


def run_algorithm(cfg: ExperimentConfig, algorithm: str | None = None) -> RunResult:
    run = cfg.run if algorithm is None else cfg.run.model_copy(update={"algorithm": algorithm})
    alg = run.algorithm
    path = cfg.build_path()
    limits = cfg.limit_set(run.limits)
    models = cfg.build_models()
    ts = cfg.sample_time_s

    if alg == "tap":
        started = _time.perf_counter()
        s_full, motion_time = tap_profile(path.length, limits, ts,
                                          tail_fraction=run.tail_fraction)
        compute_time = _time.perf_counter() - started
        trim = int(np.ceil(motion_time / ts))
        trim = min(trim, len(s_full) - 1)
        x_cmd, y_cmd = path.eval(s_full)
        profile = profile_from_path(path, s_full[: trim + 1], ts, motion_time)
        contour = _contour_result(path, models, s_full, x_cmd, y_cmd, x_cmd, y_cmd, trim)
        return RunResult(algorithm=alg, profile=profile, contour=contour,
                         cycle_time=motion_time, compute_time=compute_time,
                         ce_linear_max_um=None, lp_max_violation=None,
                         pass_cycle_times=[motion_time])

    if alg == "fo-path":
        result = solve_path_lp(PathLpSpec(
            path=path, limits=limits, sample_time=ts,
            n_grid=cfg.path_lp.n_grid, n_control=cfg.s_spline.control_points,
            degree=cfg.s_spline.degree, include_jerk=run.include_jerk,
            feasibility_tol=cfg.solver.feasibility_tol,
        ))
        prof = result.profile
        trim = len(prof.s) - 1
        contour = _contour_result(path, models, prof.s, prof.x_d, prof.y_d,
                                  prof.x_dm, prof.y_dm, trim)
        return RunResult(algorithm=alg, profile=prof, contour=contour,
                         cycle_time=result.cycle_time, compute_time=result.compute_time,
                         ce_linear_max_um=None,
                         lp_max_violation=result.lp.max_violation,
                         pass_cycle_times=[result.cycle_time])

    if alg not in ("fo-time", "fo-sep"):
        raise ConfigError(f"unknown algorithm {alg!r}")

    started = _time.perf_counter()
    s_init = _init_series(cfg, run)
    compensators = None
    if alg == "fo-sep":
        compensators = (
            build_compensator(models[0], len(s_init), cfg.fbs.control_points, cfg.fbs.degree),
            build_compensator(models[1], len(s_init), cfg.fbs.control_points, cfg.fbs.degree),
        )
    spec = TimeLpSpec(
        path=path, limits=limits, sample_time=ts, s_init=s_init,
        n_control=cfg.s_spline.control_points, degree=cfg.s_spline.degree,
        include_jerk=run.include_jerk, ce_limit_um=run.ce_limit_um,
        models=models if run.ce_limit_um is not None else None,
        compensators=compensators, eps_done=cfg.solver.eps_done,
        operator_cap=cfg.solver.operator_cap,
        feasibility_tol=cfg.solver.feasibility_tol,
    )
    result = relinearize(spec, passes=run.passes)
    compute_time = _time.perf_counter() - started

    contour = _contour_result(path, models, result.s_full, result.x_full, result.y_full,
                              result.x_dm_full, result.y_dm_full, result.cycle_index)
    ce_linear_max = (float(np.max(result.ce_linear_um))
                     if result.ce_linear_um is not None else None)
    return RunResult(algorithm=alg, profile=result.profile, contour=contour,
                     cycle_time=result.cycle_time, compute_time=compute_time,
                     ce_linear_max_um=ce_linear_max,
                     lp_max_violation=result.lp.max_violation,
                     pass_cycle_times=result.pass_cycle_times)


def compare_suite(cfg: ExperimentConfig, suite: str) -> list[dict]:
    """Side-by-side cycle/computation-time comparison rows."""
    rows = []
    if suite == "table1":
        base = {"limits": cfg.compare.table1_limits, "ce_limit_um": None, "passes": 1}
        cells = [
            ("w/o jerk", "fo-time", {"include_jerk": False, "init_jerk_limited": False}),
            ("w/o jerk", "fo-path", {"include_jerk": False}),
            ("w/ jerk", "fo-time", {"include_jerk": True, "init_jerk_limited": True}),
            ("w/ jerk", "fo-path", {"include_jerk": True}),
        ]
        for case, alg, extra in cells:
            run = cfg.run.model_copy(update={"algorithm": alg, **base, **extra,
                                             "init_limits": None})
            res = run_algorithm(cfg.model_copy(update={"run": run}))
            rows.append(_compare_row(case, alg, res))
        return rows
    if suite == "table2":
        t2 = cfg.compare.table2
        cells = [
            ("FO", "fo-time", t2.fo_init_limits),
            ("FO+SEP", "fo-sep", t2.fo_sep_init_limits),
        ]
        for case, alg, init in cells:
            run = cfg.run.model_copy(update={
                "algorithm": alg, "limits": t2.limits, "init_limits": init,
                "ce_limit_um": t2.ce_limit_um, "include_jerk": True,
                "init_jerk_limited": True,
            })
            res = run_algorithm(cfg.model_copy(update={"run": run}))
            rows.append(_compare_row(case, alg, res))
        return rows
    raise ConfigError(f"unknown suite {suite!r} (expected table1 or table2)")


def _compare_row(case: str, alg: str, res: RunResult) -> dict:
    return {
        "case": case,
        "algorithm": alg,
        "cycle_time_s": res.cycle_time,
        "compute_time_s": res.compute_time,
        "max_ce_estimated_um": res.contour.max_estimated_um,
        "max_ce_simulated_um": res.contour.max_exact_um,
    }


def simulate_trajectory(cfg: ExperimentConfig, x_d, y_d,
                        x_dm=None, y_dm=None, s=None) -> tuple[ContourResult, dict]:
    """Apply stored commands through the configured models and score them."""
    path = cfg.build_path()
    models = cfg.build_models()
    x_cmd = np.asarray(x_d, dtype=float)
    y_cmd = np.asarray(y_d, dtype=float)
    if len(x_cmd) != len(y_cmd) or len(x_cmd) < 2:
        raise ConfigError("trajectory needs x_d and y_d series of equal length >= 2")
    x_in = x_cmd if x_dm is None else np.asarray(x_dm, dtype=float)
    y_in = y_cmd if y_dm is None else np.asarray(y_dm, dtype=float)
    if s is None:
        # recover the path parameter from the commanded points
        s_full = np.array([path.nearest_point(p)[0]
                           for p in np.column_stack([x_cmd, y_cmd])])
        s_full = np.maximum.accumulate(s_full)
    else:
        s_full = np.asarray(s, dtype=float)
    contour = _contour_result(path, models, s_full, x_cmd, y_cmd, x_in, y_in,
                              len(x_cmd) - 1)
    summary = {
        "algorithm": "simulate",
        "cycle_time_s": (len(x_cmd) - 1) * cfg.sample_time_s,
        "compute_time_s": 0.0,
        "max_ce_estimated_um": contour.max_estimated_um,
        "max_ce_simulated_um": contour.max_exact_um,
    }
    return contour, summary


def model_info(cfg: ExperimentConfig) -> dict:
    """DC gains, pole magnitudes and compensator conditioning for the config."""
    raw = cfg.raw_models()
    conditioned = cfg.build_models()
    s_init = _init_series(cfg, cfg.run)
    info: dict = {"horizon_samples": len(s_init), "models": {}}
    for axis, tf_raw, tf_cond in (("x", raw[0], conditioned[0]), ("y", raw[1], conditioned[1])):
        comp = build_compensator(tf_cond, len(s_init), cfg.fbs.control_points, cfg.fbs.degree)
        info["models"][axis] = {
            "dc_gain_raw": dc_gain(tf_raw),
            "dc_gain": dc_gain(tf_cond),
            "max_pole_magnitude_raw": float(np.max(np.abs(tf_raw.poles))),
            "max_pole_magnitude": float(np.max(np.abs(tf_cond.poles))),
            "stable_raw": tf_raw.is_stable,
            "stable": tf_cond.is_stable,
            "fbs_condition_number": comp.condition_number,
        }
    return info
