"""Experiment configuration: schema, validation and YAML loading.

Configs are strict: unknown keys are rejected so typos fail loudly.  The
bundled printer model coefficients (curve-fit x/y axis dynamics at 1 kHz) are
available as the ``printer`` preset.
"""

import math
from pathlib import Path
from typing import Literal, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from feedopt.dynamics import DiscreteTransferFunction, condition_rounded_model, normalize_dc
from feedopt.errors import ConfigError
from feedopt.geometry import CirclePath, SplinePath, Toolpath
from feedopt.trajgen import KinematicLimits

__all__ = ["ExperimentConfig", "load_config", "load_config_text", "resolve_config_path",
           "PRINTER_MODEL_X", "PRINTER_MODEL_Y"]

# published curve-fit printer axis models, descending powers of z, 1 kHz
PRINTER_MODEL_X = {
    "num": [0.021, -0.061, 0.044, 0.033, -0.056, 0.012],
    "den": [1.0, -5.627, 13.38, -17.2, 12.6, -4.994, 0.836],
}
PRINTER_MODEL_Y = {
    "num": [0.018, -0.053, 0.038, 0.027, -0.048, 0.017],
    "den": [1.0, -5.648, 13.48, -17.4, 12.8, -5.093, 0.856],
}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CirclePathConfig(_Strict):
    type: Literal["circle"]
    center: tuple[float, float] = (0.0, 0.0)
    radius_mm: float = Field(gt=0)
    start_angle_rad: float = 0.0
    sweep_rad: float = 2.0 * math.pi


class SplinePathConfig(_Strict):
    type: Literal["spline"]
    degree: int = Field(ge=1)
    control_points: list[tuple[float, float]] = Field(min_length=2)
    knots: list[float] | None = None


PathConfig = Union[CirclePathConfig, SplinePathConfig]


class LimitsConfig(_Strict):
    feedrate_mm_s: float = Field(gt=0)
    accel_m_s2: float = Field(gt=0)
    jerk_m_s3: float = Field(gt=0)

    def to_limits(self) -> KinematicLimits:
        return KinematicLimits(self.feedrate_mm_s, self.accel_m_s2, self.jerk_m_s3)


class AxisModelConfig(_Strict):
    num: list[float] = Field(min_length=1)
    den: list[float] = Field(min_length=1)


class ConditionConfig(_Strict):
    enabled: bool = True
    accel_error_bandwidth_hz: float = Field(default=20.0, gt=0)
    damping_power: float = Field(default=2.5, gt=0)


class ModelsConfig(_Strict):
    preset: Literal["printer"] | None = None
    x: AxisModelConfig | None = None
    y: AxisModelConfig | None = None
    dc_normalize: bool = True
    condition: ConditionConfig = ConditionConfig()

    @model_validator(mode="after")
    def _check_axes(self):
        if self.preset is None and (self.x is None or self.y is None):
            raise ValueError("models need either a preset or explicit x and y coefficients")
        return self


class SplineSettings(_Strict):
    control_points: int = Field(default=40, ge=4)
    degree: int = Field(default=5, ge=1)


Algorithm = Literal["tap", "fo-time", "fo-sep", "fo-path"]


class RunConfig(_Strict):
    algorithm: Algorithm = "fo-time"
    limits: str = "conservative"
    init_limits: str | None = None          # TAP initializer limit set (default: run limits)
    init_jerk_limited: bool = True          # False -> trapezoidal-velocity initializer
    tail_fraction: float = Field(default=0.10, ge=0.0, le=1.0)
    ce_limit_um: float | None = Field(default=None, gt=0)
    include_jerk: bool = True
    passes: int = Field(default=1, ge=1)


class Table2Config(_Strict):
    limits: str = "aggressive"
    fo_init_limits: str = "conservative"
    fo_sep_init_limits: str = "aggressive"
    ce_limit_um: float = Field(default=14.0, gt=0)


class CompareConfig(_Strict):
    table1_limits: str = "conservative"
    table2: Table2Config = Table2Config()


class SolverConfig(_Strict):
    feasibility_tol: float = Field(default=1e-8, gt=0)
    eps_done: float = Field(default=1e-5, gt=0)
    operator_cap: int = Field(default=20000, ge=1)


class PathGridConfig(_Strict):
    n_grid: int = Field(default=1001, ge=11)


class ExperimentConfig(_Strict):
    path: PathConfig = Field(discriminator="type")
    sample_time_s: float = Field(gt=0)
    limits: dict[str, LimitsConfig] = Field(min_length=1)
    run: RunConfig = RunConfig()
    s_spline: SplineSettings = SplineSettings()
    fbs: SplineSettings = SplineSettings()
    models: ModelsConfig
    solver: SolverConfig = SolverConfig()
    path_lp: PathGridConfig = PathGridConfig()
    compare: CompareConfig = CompareConfig()

    @model_validator(mode="after")
    def _check_limit_names(self):
        def need(name: str, where: str):
            if name not in self.limits:
                raise ValueError(f"{where} references unknown limit set {name!r}")

        need(self.run.limits, "run.limits")
        if self.run.init_limits is not None:
            need(self.run.init_limits, "run.init_limits")
        return self

    # --- construction helpers -------------------------------------------------

    def build_path(self) -> Toolpath:
        p = self.path
        if isinstance(p, CirclePathConfig):
            return CirclePath(center=p.center, radius=p.radius_mm,
                              start_angle=p.start_angle_rad, sweep=p.sweep_rad)
        return SplinePath(control_points=p.control_points, degree=p.degree, knots=p.knots)

    def raw_models(self) -> tuple[DiscreteTransferFunction, DiscreteTransferFunction]:
        m = self.models
        if m.preset == "printer":
            coeff_x, coeff_y = PRINTER_MODEL_X, PRINTER_MODEL_Y
        else:
            coeff_x = {"num": m.x.num, "den": m.x.den}
            coeff_y = {"num": m.y.num, "den": m.y.den}
        ts = self.sample_time_s
        return (DiscreteTransferFunction(coeff_x["num"], coeff_x["den"], ts),
                DiscreteTransferFunction(coeff_y["num"], coeff_y["den"], ts))

    def build_models(self) -> tuple[DiscreteTransferFunction, DiscreteTransferFunction]:
        """Raw coefficients run through conditioning / DC normalization per config."""
        tf_x, tf_y = self.raw_models()
        cond = self.models.condition
        if cond.enabled:
            tf_x = condition_rounded_model(tf_x, cond.accel_error_bandwidth_hz, cond.damping_power)
            tf_y = condition_rounded_model(tf_y, cond.accel_error_bandwidth_hz, cond.damping_power)
        if self.models.dc_normalize:
            tf_x = normalize_dc(tf_x)
            tf_y = normalize_dc(tf_y)
        return tf_x, tf_y

    def limit_set(self, name: str) -> KinematicLimits:
        try:
            return self.limits[name].to_limits()
        except KeyError:
            raise ConfigError(f"unknown limit set {name!r}") from None


def load_config_text(text: str) -> ExperimentConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"invalid config: {loc}: {first['msg']}") from exc


def resolve_config_path(name: str) -> Path:
    """Accept a filesystem path or the bare name of a bundled preset."""
    p = Path(name)
    if p.exists():
        return p
    candidate = Path(__file__).parent / "presets" / name
    if candidate.exists():
        return candidate
    candidate = candidate.with_suffix(".cfg")
    if candidate.exists():
        return candidate
    raise ConfigError(f"config file not found: {name}")


def load_config(name: str | Path) -> ExperimentConfig:
    path = resolve_config_path(str(name))
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return load_config_text(text)
