import numpy as np
import pytest

from feedopt.dynamics import DiscreteTransferFunction, lift, simulate
from feedopt.errors import FbsBuildError, OperatorSizeError
from feedopt.fbs import build_compensator, compensate, operator_matrix
from feedopt.trajgen import KinematicLimits, tap_profile

TS = 1e-3


def test_identity_model_gives_projector(identity_tf, rng):
    comp = build_compensator(identity_tf, 120, 12, 3)
    assert np.array_equal(comp.filtered, comp.basis)
    c = operator_matrix(comp)
    assert np.max(np.abs(c @ c - c)) < 1e-10  # orthogonal projector onto span(N)
    assert np.max(np.abs(c - c.T)) < 1e-10
    # fixed point for commands already in the span
    p = rng.normal(size=12)
    x = comp.basis @ p
    assert np.max(np.abs(compensate(comp, x) - x)) < 1e-10


def test_zero_command_maps_to_zero(identity_tf):
    comp = build_compensator(identity_tf, 60, 8, 3)
    assert np.max(np.abs(compensate(comp, np.zeros(60)))) == 0.0


def test_delay_model_shifts_basis(delay_tf):
    comp = build_compensator(delay_tf, 80, 10, 3)
    assert np.allclose(comp.filtered[1:], comp.basis[:-1], atol=1e-14)
    assert np.allclose(comp.filtered[0], 0.0)


def test_printer_build_condition_number(printer_models):
    comp_x = build_compensator(printer_models[0], 1130, 40, 5)
    comp_y = build_compensator(printer_models[1], 1130, 40, 5)
    assert comp_x.condition_number < 1e12 and comp_y.condition_number < 1e12
    # frozen from the first successful build of this configuration
    assert comp_x.condition_number == pytest.approx(22.221230333567252, rel=1e-3)
    assert comp_y.condition_number == pytest.approx(22.98319731316405, rel=1e-3)


def test_compensation_reduces_tracking_error(printer_models, circle):
    limits = KinematicLimits(feedrate_mm_s=30.0, accel_m_s2=0.5, jerk_m_s3=5.0)
    s, _ = tap_profile(circle.length, limits, TS)
    x_d = circle.eval(s)[0]
    model = printer_models[0]
    comp = build_compensator(model, len(s), 40, 5)
    dev = x_d - x_d[0]
    x_dm = compensate(comp, dev)
    rms_comp = np.sqrt(np.mean((dev - simulate(model, x_dm)) ** 2))
    rms_raw = np.sqrt(np.mean((dev - simulate(model, dev)) ** 2))
    assert rms_comp < rms_raw


def test_normal_equations_residual(printer_models, rng):
    comp = build_compensator(printer_models[0], 400, 20, 5)
    x = rng.normal(size=400)
    p_star = np.linalg.lstsq(comp.filtered, x, rcond=None)[0]
    residual = comp.filtered.T @ (x - comp.filtered @ p_star)
    assert np.max(np.abs(residual)) <= 1e-9 * np.linalg.norm(x)
    # compensate() uses the same fit
    assert np.allclose(compensate(comp, x), comp.basis @ p_star, atol=1e-9)


def test_least_squares_optimality(printer_models, rng):
    comp = build_compensator(printer_models[0], 300, 15, 4)
    x = rng.normal(size=300)
    p_star = np.linalg.lstsq(comp.filtered, x, rcond=None)[0]
    best = np.linalg.norm(x - comp.filtered @ p_star)
    for _ in range(25):
        delta = rng.normal(size=15) * 0.1
        assert np.linalg.norm(x - comp.filtered @ (p_star + delta)) >= best - 1e-12


def test_compensate_linear(printer_models, rng):
    comp = build_compensator(printer_models[0], 200, 12, 3)
    u, v = rng.normal(size=(2, 200))
    lhs = compensate(comp, 3.0 * u - 0.5 * v)
    rhs = 3.0 * compensate(comp, u) - 0.5 * compensate(comp, v)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_operator_matches_implicit_application(printer_models, rng):
    comp = build_compensator(printer_models[0], 250, 14, 4)
    c = operator_matrix(comp)
    assert np.all(np.isfinite(c))
    for _ in range(5):
        v = rng.normal(size=250)
        assert np.max(np.abs(c @ v - compensate(comp, v))) < 1e-10


def test_operator_cap(printer_models):
    comp = build_compensator(printer_models[0], 150, 10, 3)
    with pytest.raises(OperatorSizeError):
        operator_matrix(comp, cap=100)


def test_identity_compensator_reduces_residual_to_complement(identity_tf, rng):
    comp = build_compensator(identity_tf, 90, 9, 3)
    g = lift(identity_tf, 90).matrix()
    resid = np.eye(90) - g @ operator_matrix(comp)
    # annihilates the basis span
    assert np.max(np.abs(resid @ comp.basis)) < 1e-10


def test_build_errors(printer_models, identity_tf):
    with pytest.raises(ValueError):
        build_compensator(printer_models[0], 10, 20, 3)
    with pytest.raises(ValueError):
        build_compensator(printer_models[0], 50, 10, 0)
    zero_model = DiscreteTransferFunction([0.0], [1.0], TS)
    with pytest.raises(FbsBuildError):
        build_compensator(zero_model, 50, 10, 3)
    comp = build_compensator(identity_tf, 50, 10, 3)
    with pytest.raises(ValueError):
        compensate(comp, np.zeros(49))
