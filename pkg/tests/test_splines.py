import numpy as np
import pytest

from feedopt.splines import KnotVector, basis_matrix, basis_value, derivative_basis_matrix


def test_degree_zero_indicator():
    kv = KnotVector(degree=0, knots=np.array([0.0, 0.5, 1.0]))
    assert basis_value(kv, 0, 0.25) == 1.0
    assert basis_value(kv, 0, 0.75) == 0.0
    assert basis_value(kv, 1, 0.75) == 1.0
    assert basis_value(kv, 1, 1.0) == 1.0  # closed last span


def test_degree_one_hand_value():
    # one step of the recursion on clamped knots [0, 0, 0.5, 1, 1]
    kv = KnotVector(degree=1, knots=np.array([0.0, 0.0, 0.5, 1.0, 1.0]))
    assert basis_value(kv, 0, 0.25) == pytest.approx(0.5, abs=1e-15)


def test_partition_of_unity_and_nonnegativity():
    kv = KnotVector.clamped_uniform(40, 5)
    mat = basis_matrix(kv, 1130)
    assert np.all(mat >= 0)
    assert np.max(np.abs(mat.sum(axis=1) - 1.0)) < 1e-12


@pytest.mark.parametrize("n,degree,rows", [(7, 2, 64), (12, 3, 200), (9, 4, 9)])
def test_partition_of_unity_various(n, degree, rows):
    mat = basis_matrix(KnotVector.clamped_uniform(n, degree), rows)
    assert np.max(np.abs(mat.sum(axis=1) - 1.0)) < 1e-12


def test_basis_value_sum_is_one(rng):
    kv = KnotVector.clamped_uniform(11, 3)
    for zeta in rng.uniform(0, 1, 50):
        total = sum(basis_value(kv, j, zeta) for j in range(kv.n))
        assert total == pytest.approx(1.0, abs=1e-12)


def test_degree_zero_identity_pattern():
    n = 16
    kv = KnotVector.clamped_uniform(n, 0)
    mat = basis_matrix(kv, n)
    assert np.array_equal(mat, np.eye(n))


def test_constant_reproduction():
    kv = KnotVector.clamped_uniform(13, 4)
    mat = basis_matrix(kv, 300)
    values = mat @ np.full(13, 3.7)
    assert np.max(np.abs(values - 3.7)) < 1e-12


def test_local_support():
    kv = KnotVector.clamped_uniform(10, 3)
    rows = 500
    mat = basis_matrix(kv, rows)
    zeta = np.linspace(0, 1, rows)
    for j in range(kv.n):
        lo, hi = kv.knots[j], kv.knots[j + kv.degree + 1]
        outside = (zeta < lo - 1e-15) | (zeta > hi + 1e-15)
        assert np.all(mat[outside, j] == 0.0)


def test_endpoint_interpolation_clamped():
    mat = basis_matrix(KnotVector.clamped_uniform(9, 5), 101)
    assert mat[0, 0] == pytest.approx(1.0, abs=1e-14)
    assert mat[-1, -1] == pytest.approx(1.0, abs=1e-14)


def test_derivative_of_constant_is_zero():
    kv = KnotVector.clamped_uniform(10, 5)
    d1 = derivative_basis_matrix(kv, 1, 200)
    assert np.max(np.abs(d1 @ np.ones(10))) < 1e-9


def test_derivative_of_identity_ramp():
    kv = KnotVector.clamped_uniform(10, 5)
    rows = 400
    mat = basis_matrix(kv, rows)
    zeta = np.linspace(0, 1, rows)
    ctrl, *_ = np.linalg.lstsq(mat, zeta, rcond=None)
    d1 = derivative_basis_matrix(kv, 1, rows)
    assert np.max(np.abs(d1 @ ctrl - 1.0)) < 1e-8


def test_derivative_matches_finite_difference(rng):
    kv = KnotVector.clamped_uniform(8, 5)
    rows = 40001
    ctrl = rng.uniform(-1, 1, kv.n)
    values = basis_matrix(kv, rows) @ ctrl
    d1 = derivative_basis_matrix(kv, 1, rows) @ ctrl
    h = 1.0 / (rows - 1)
    central = (values[2:] - values[:-2]) / (2 * h)
    assert np.max(np.abs(central - d1[1:-1])) < 1e-6


def test_second_derivative_matches_finite_difference(rng):
    kv = KnotVector.clamped_uniform(8, 5)
    rows = 40001
    ctrl = rng.uniform(-1, 1, kv.n)
    d1 = derivative_basis_matrix(kv, 1, rows) @ ctrl
    d2 = derivative_basis_matrix(kv, 2, rows) @ ctrl
    h = 1.0 / (rows - 1)
    central = (d1[2:] - d1[:-2]) / (2 * h)
    assert np.max(np.abs(central - d2[1:-1])) < 1e-5


def test_uniform_unclamped_interior_partition():
    kv = KnotVector.uniform(12, 3)
    rows = 600
    mat = basis_matrix(kv, rows)
    zeta = np.linspace(0, 1, rows)
    interior = (zeta >= kv.knots[kv.degree]) & (zeta <= kv.knots[kv.n])
    assert np.max(np.abs(mat[interior].sum(axis=1) - 1.0)) < 1e-12


def test_argument_errors():
    kv = KnotVector.clamped_uniform(8, 3)
    with pytest.raises(ValueError):
        basis_value(kv, 8, 0.5)
    with pytest.raises(ValueError):
        basis_value(kv, -1, 0.5)
    with pytest.raises(ValueError):
        basis_value(kv, 0, 1.5)
    with pytest.raises(ValueError):
        derivative_basis_matrix(kv, 4, 100)
    with pytest.raises(ValueError):
        basis_matrix(kv, 7)
    with pytest.raises(ValueError):
        KnotVector(degree=2, knots=np.array([0.0, 0.5, 0.4, 1.0, 1.0, 1.0]))
