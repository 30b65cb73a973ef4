import numpy as np
import pytest

from feedopt.contour import ContourResult, estimate_ce, exact_ce
from feedopt.geometry import CirclePath


def test_estimate_axis_aligned():
    e_x = np.array([1.0, 2.0, -1.0])
    e_y = np.array([0.5, -0.5, 2.0])
    assert np.allclose(estimate_ce(e_x, e_y, np.zeros(3)), e_y)
    assert np.allclose(estimate_ce(e_x, e_y, np.full(3, np.pi / 2)), -e_x)


def test_estimate_diagonal_cancels():
    e = np.array([0.3, -0.7, 1.1])
    ce = estimate_ce(e, e, np.full(3, np.pi / 4))
    assert np.max(np.abs(ce)) < 1e-15


def test_estimate_linear(rng):
    e_x, e_y, f_x, f_y = rng.normal(size=(4, 50))
    theta = rng.uniform(-np.pi, np.pi, 50)
    lhs = estimate_ce(2 * e_x + f_x, 2 * e_y + f_y, theta)
    rhs = 2 * estimate_ce(e_x, e_y, theta) + estimate_ce(f_x, f_y, theta)
    assert np.allclose(lhs, rhs, atol=1e-12)


def test_length_mismatch():
    with pytest.raises(ValueError):
        estimate_ce(np.zeros(3), np.zeros(4), np.zeros(3))


def test_exact_on_path_is_zero(circle, rng):
    s = rng.uniform(0, 1, 20)
    x, y = circle.eval(s)
    ce = exact_ce(np.column_stack([x, y]), circle)
    assert np.max(np.abs(ce)) < 1e-9


def test_exact_radial_offset_sign(circle):
    # actual trace on a slightly larger circle: positive by convention
    s = np.linspace(0.05, 0.95, 40)
    actual = np.column_stack([5.001 * np.cos(2 * np.pi * s), 5.001 * np.sin(2 * np.pi * s)])
    ce = exact_ce(actual, circle)
    assert np.allclose(ce, 0.001, atol=1e-9)


def test_estimate_sign_matches_exact_for_radial_error(circle):
    s = np.linspace(0.1, 0.9, 30)
    theta = circle.tangent_angle(s)
    x, y = circle.eval(s)
    outward = 0.002
    actual = np.column_stack([x + outward * np.cos(2 * np.pi * s),
                              y + outward * np.sin(2 * np.pi * s)])
    e_x, e_y = x - actual[:, 0], y - actual[:, 1]
    est = estimate_ce(e_x, e_y, theta)
    exact = exact_ce(actual, circle)
    assert np.all(est * exact > 0)
    assert np.allclose(est, exact, rtol=1e-3)


def test_estimate_close_to_exact_for_small_errors(circle, rng):
    # mixed normal + tangential perturbations below 1% of the radius
    s = np.linspace(0.05, 0.95, 60)
    theta = circle.tangent_angle(s)
    x, y = circle.eval(s)
    normal = rng.uniform(-0.03, 0.03, len(s))
    tangential = rng.uniform(-0.03, 0.03, len(s))
    nx, ny = -np.sin(theta), np.cos(theta)
    tx, ty = np.cos(theta), np.sin(theta)
    actual_x = x + normal * nx + tangential * tx
    actual_y = y + normal * ny + tangential * ty
    est = estimate_ce(x - actual_x, y - actual_y, theta)
    exact = exact_ce(np.column_stack([actual_x, actual_y]), circle)
    tol = 0.05 * max(np.max(np.abs(exact)), 1e-3)
    assert np.max(np.abs(est - exact)) <= tol


def test_contour_result_maxes():
    result = ContourResult(estimated_um=np.array([1.0, -3.0, 2.0]),
                           exact_um=np.array([0.5, -2.5, 1.0]))
    assert result.max_estimated_um == 3.0
    assert result.max_exact_um == 2.5
    with pytest.raises(ValueError):
        ContourResult(estimated_um=np.zeros(3), exact_um=np.zeros(2))
