import numpy as np
import pytest
import scipy.sparse as sp

from feedopt.lp import INFEASIBLE, OPTIMAL, LpProblem, LpSolution, solve_lp


def test_simple_maximization():
    problem = LpProblem(c=[-1.0], a_ub=[[1.0]], b_ub=[1.0], lower=[0.0], upper=[None])
    sol = solve_lp(problem)
    assert sol.status == OPTIMAL
    assert sol.x[0] == pytest.approx(1.0, abs=1e-9)
    assert sol.objective == pytest.approx(-1.0, abs=1e-9)


def test_infeasible():
    problem = LpProblem(c=[1.0], a_ub=[[1.0]], b_ub=[-1.0], lower=[0.0])
    assert solve_lp(problem).status == INFEASIBLE


def test_two_variable_face():
    problem = LpProblem(c=[-1.0, -1.0], a_ub=[[1.0, 1.0]], b_ub=[1.0],
                        lower=[0.0, 0.0])
    sol = solve_lp(problem)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(-1.0, abs=1e-9)
    assert sol.x[0] + sol.x[1] == pytest.approx(1.0, abs=1e-9)


def test_unbounded():
    problem = LpProblem(c=[-1.0])
    sol = solve_lp(problem)
    assert sol.status in ("unbounded", "numerical-failure")
    assert sol.x is None


def test_equality_system():
    problem = LpProblem(c=[1.0, 0.0], a_eq=[[1.0, 1.0]], b_eq=[2.0],
                        lower=[0.0, 0.0])
    sol = solve_lp(problem)
    assert sol.status == OPTIMAL
    assert sol.x[0] == pytest.approx(0.0, abs=1e-9)
    assert sol.x[1] == pytest.approx(2.0, abs=1e-9)


def test_cost_scaling_invariance():
    a = sp.csr_matrix(np.array([[1.0, 2.0], [3.0, 1.0]]))
    b = np.array([4.0, 6.0])
    base = solve_lp(LpProblem(c=[-1.0, -1.0], a_ub=a, b_ub=b, lower=[0.0, 0.0]))
    scaled = solve_lp(LpProblem(c=[-1000.0, -1000.0], a_ub=a, b_ub=b, lower=[0.0, 0.0]))
    assert np.allclose(base.x, scaled.x, atol=1e-10)


def test_violation_report_consistent(rng):
    n = 20
    a = rng.normal(size=(60, n))
    x_feas = rng.uniform(0, 1, n)
    b = a @ x_feas + rng.uniform(0.01, 1.0, 60)
    problem = LpProblem(c=rng.normal(size=n), a_ub=a, b_ub=b,
                        lower=np.zeros(n), upper=np.ones(n))
    sol = solve_lp(problem)
    assert sol.status == OPTIMAL
    scale = 1.0 / np.abs(a).max(axis=1)
    recomputed = np.max(scale * (a @ sol.x - b))
    assert recomputed <= sol.max_violation + 1e-15
    assert sol.max_violation <= 1e-8


def test_row_scaling_mixed_magnitudes():
    # micrometre-scale row next to a huge-scale row
    a = np.array([[1e-6, 0.0], [0.0, 1e6]])
    b = np.array([1e-6, 1e6])
    sol = solve_lp(LpProblem(c=[-1.0, -1.0], a_ub=a, b_ub=b, lower=[0.0, 0.0]))
    assert sol.status == OPTIMAL
    assert np.allclose(sol.x, [1.0, 1.0], rtol=1e-8)


def test_validation_errors():
    with pytest.raises(ValueError):
        LpProblem(c=[np.nan])
    with pytest.raises(ValueError):
        LpProblem(c=[1.0], a_ub=[[1.0, 2.0]], b_ub=[1.0])
    with pytest.raises(ValueError):
        LpProblem(c=[1.0], a_ub=[[np.inf]], b_ub=[1.0])
    with pytest.raises(ValueError):
        LpProblem(c=[1.0], a_ub=[[1.0]], b_ub=[1.0, 2.0])
    with pytest.raises(ValueError):
        LpProblem(c=[1.0], b_ub=[1.0])


def test_solution_dataclass():
    sol = LpSolution(status=OPTIMAL, x=np.zeros(2), objective=0.0, max_violation=0.0)
    assert sol.meta == {}
