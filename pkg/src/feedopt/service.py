"""FastAPI service wrapping the optimization core.

Endpoints accept a full experiment config in the request body and return
summaries plus sampled series; domain errors map to structured payloads whose
``code`` mirrors the CLI exit codes (2 config, 3 infeasible, 4 numerical).
"""

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict

from feedopt.config import ExperimentConfig
from feedopt.errors import (
    ConfigError,
    DegenerateStopError,
    FbsBuildError,
    InfeasibleError,
    NumericalError,
    OperatorSizeError,
)
from feedopt.runner import RunResult, compare_suite, model_info, run_algorithm, simulate_trajectory

__all__ = ["app", "create_app"]


class SummaryPayload(BaseModel):
    algorithm: str
    cycle_time_s: float
    compute_time_s: float
    max_ce_estimated_um: float
    max_ce_simulated_um: float
    ce_linear_max_um: float | None = None
    lp_max_violation: float | None = None


class TrajectoryPayload(BaseModel):
    t: list[float]
    s: list[float]
    x_d: list[float]
    y_d: list[float]
    x_dm: list[float]
    y_dm: list[float]
    feedrate: list[float]
    ax: list[float]
    ay: list[float]
    jx: list[float]
    jy: list[float]


class ContourPayload(BaseModel):
    t: list[float]
    ce_estimated_um: list[float]
    ce_exact_um: list[float]


class RunRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ExperimentConfig
    algorithm: str | None = None


class RunResponse(BaseModel):
    summary: SummaryPayload
    trajectory: TrajectoryPayload
    contour: ContourPayload
    pass_cycle_times: list[float]


class CompareRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ExperimentConfig
    suite: str


class CompareRow(BaseModel):
    case: str
    algorithm: str
    cycle_time_s: float
    compute_time_s: float
    max_ce_estimated_um: float
    max_ce_simulated_um: float


class CompareResponse(BaseModel):
    suite: str
    rows: list[CompareRow]


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ExperimentConfig
    x_d: list[float]
    y_d: list[float]
    x_dm: list[float] | None = None
    y_dm: list[float] | None = None
    s: list[float] | None = None


class SimulateResponse(BaseModel):
    summary: SummaryPayload
    contour: ContourPayload


class InfoRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")
    config: ExperimentConfig


def _error(code: int, reason: str) -> HTTPException:
    return HTTPException(status_code=400, detail={"code": code, "reason": reason})


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError as exc:
        raise _error(2, str(exc)) from exc
    except InfeasibleError as exc:
        raise _error(3, str(exc)) from exc
    except (NumericalError, DegenerateStopError, FbsBuildError, OperatorSizeError) as exc:
        raise _error(4, str(exc)) from exc
    except ValueError as exc:
        raise _error(2, str(exc)) from exc


def _run_response(result: RunResult) -> RunResponse:
    prof = result.profile
    t = prof.t
    trajectory = TrajectoryPayload(
        t=t.tolist(), s=prof.s.tolist(), x_d=prof.x_d.tolist(), y_d=prof.y_d.tolist(),
        x_dm=prof.x_dm.tolist(), y_dm=prof.y_dm.tolist(),
        feedrate=prof.feedrate.tolist(), ax=prof.accel_x.tolist(), ay=prof.accel_y.tolist(),
        jx=prof.jerk_x.tolist(), jy=prof.jerk_y.tolist(),
    )
    n_ce = len(result.contour.estimated_um)
    contour = ContourPayload(
        t=t[:n_ce].tolist(),
        ce_estimated_um=result.contour.estimated_um.tolist(),
        ce_exact_um=result.contour.exact_um.tolist(),
    )
    return RunResponse(summary=SummaryPayload(**result.summary), trajectory=trajectory,
                       contour=contour, pass_cycle_times=result.pass_cycle_times)


def create_app() -> FastAPI:
    app = FastAPI(title="feedopt", version="0.1.0",
                  description="Feedrate optimization with servo error pre-compensation")

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/run", response_model=RunResponse)
    def run(request: RunRequest) -> RunResponse:
        result = _guard(run_algorithm, request.config, request.algorithm)
        return _run_response(result)

    @app.post("/compare", response_model=CompareResponse)
    def compare(request: CompareRequest) -> CompareResponse:
        rows = _guard(compare_suite, request.config, request.suite)
        return CompareResponse(suite=request.suite, rows=[CompareRow(**row) for row in rows])

    @app.post("/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest) -> SimulateResponse:
        contour, summary = _guard(
            simulate_trajectory, request.config,
            request.x_d, request.y_d, request.x_dm, request.y_dm, request.s,
        )
        ts = request.config.sample_time_s
        t = [k * ts for k in range(len(contour.estimated_um))]
        return SimulateResponse(
            summary=SummaryPayload(**summary),
            contour=ContourPayload(t=t, ce_estimated_um=contour.estimated_um.tolist(),
                                   ce_exact_um=contour.exact_um.tolist()),
        )

    @app.post("/info")
    def info(request: InfoRequest) -> dict:
        return _guard(model_info, request.config)

    return app


app = create_app()
