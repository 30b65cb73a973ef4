import math

import pytest

from feedopt.config import (
    ExperimentConfig,
    load_config,
    load_config_text,
    resolve_config_path,
)
from feedopt.dynamics import dc_gain
from feedopt.errors import ConfigError

MINIMAL = """
path: {type: circle, radius_mm: 5.0}
sample_time_s: 0.001
limits:
  conservative: {feedrate_mm_s: 30.0, accel_m_s2: 0.5, jerk_m_s3: 5.0}
models: {preset: printer}
"""


def test_minimal_config():
    cfg = load_config_text(MINIMAL)
    assert cfg.run.algorithm == "fo-time"
    assert cfg.run.limits == "conservative"
    assert cfg.path.sweep_rad == pytest.approx(2 * math.pi)
    assert cfg.s_spline.control_points == 40 and cfg.s_spline.degree == 5


def test_presets_load():
    for name in ("printer_circle", "table1"):
        cfg = load_config(name)
        assert isinstance(cfg, ExperimentConfig)
    assert load_config("printer_circle").run.ce_limit_um == 14.0


def test_resolve_bare_name_and_path(tmp_path):
    assert resolve_config_path("printer_circle").name == "printer_circle.cfg"
    custom = tmp_path / "mine.cfg"
    custom.write_text(MINIMAL, encoding="utf-8")
    assert resolve_config_path(str(custom)) == custom
    with pytest.raises(ConfigError, match="not found"):
        resolve_config_path("no_such_config")


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError, match="extra"):
        load_config_text(MINIMAL + "\nbogus_section: {}\n")


def test_negative_feedrate_rejected():
    bad = MINIMAL.replace("feedrate_mm_s: 30.0", "feedrate_mm_s: -3.0")
    with pytest.raises(ConfigError, match="feedrate_mm_s"):
        load_config_text(bad)


def test_unknown_limit_reference():
    bad = MINIMAL + "\nrun: {limits: spicy}\n"
    with pytest.raises(ConfigError, match="spicy"):
        load_config_text(bad)


def test_models_need_axes_or_preset():
    bad = MINIMAL.replace("models: {preset: printer}",
                          "models: {x: {num: [1.0], den: [1.0]}}")
    with pytest.raises(ConfigError, match="preset"):
        load_config_text(bad)


def test_not_yaml_and_not_mapping():
    with pytest.raises(ConfigError, match="YAML"):
        load_config_text("path: [unclosed")
    with pytest.raises(ConfigError, match="mapping"):
        load_config_text("- just\n- a list\n")


def test_raw_model_dc_gains():
    cfg = load_config_text(MINIMAL)
    tf_x, tf_y = cfg.raw_models()
    assert dc_gain(tf_x) == pytest.approx(1.4, rel=1e-6)
    assert dc_gain(tf_y) == pytest.approx(0.2, rel=1e-6)


def test_conditioned_models_stable_unity_dc():
    cfg = load_config_text(MINIMAL)
    tf_x, tf_y = cfg.build_models()
    assert tf_x.is_stable and tf_y.is_stable
    assert dc_gain(tf_x) == pytest.approx(1.0, abs=1e-12)
    assert dc_gain(tf_y) == pytest.approx(1.0, abs=1e-12)


def test_condition_disabled_keeps_raw_poles():
    text = MINIMAL.replace(
        "models: {preset: printer}",
        "models: {preset: printer, dc_normalize: false, condition: {enabled: false}}",
    )
    cfg = load_config_text(text)
    tf_x, _ = cfg.build_models()
    assert not tf_x.is_stable


def test_spline_path_config():
    text = """
path:
  type: spline
  degree: 2
  control_points: [[0.0, 0.0], [5.0, 0.0], [10.0, 0.0]]
sample_time_s: 0.001
limits:
  conservative: {feedrate_mm_s: 30.0, accel_m_s2: 0.5, jerk_m_s3: 5.0}
models: {preset: printer}
"""
    cfg = load_config_text(text)
    path = cfg.build_path()
    assert path.length == pytest.approx(10.0, rel=1e-9)
