"""Minimal deterministic linear-program contract shared by both optimizers.

Rows are equilibrated to unit infinity norm before the solve so feasibility
tolerances are meaningful across constraint families whose natural scales
differ by orders of magnitude (micrometre contour rows vs jerk rows).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

__all__ = ["LpProblem", "LpSolution", "solve_lp"]

FEASIBILITY_TOL = 1e-8

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical-failure"


def _as_csr(a, n_vars: int, name: str) -> sp.csr_matrix | None:
    if a is None:
        return None
    mat = sp.csr_matrix(a)
    if mat.shape[1] != n_vars:
        raise ValueError(f"{name} has {mat.shape[1]} columns, expected {n_vars}")
    if not np.all(np.isfinite(mat.data)):
        raise ValueError(f"{name} contains non-finite entries")
    return mat


@dataclass
class LpProblem:
    """min c.x  s.t.  a_ub x <= b_ub,  a_eq x = b_eq,  lower <= x <= upper."""

    c: np.ndarray
    a_ub: sp.csr_matrix | None = None
    b_ub: np.ndarray | None = None
    a_eq: sp.csr_matrix | None = None
    b_eq: np.ndarray | None = None
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        if not np.all(np.isfinite(self.c)):
            raise ValueError("cost vector contains non-finite entries")
        n = len(self.c)
        self.a_ub = _as_csr(self.a_ub, n, "a_ub")
        self.a_eq = _as_csr(self.a_eq, n, "a_eq")
        for mat, vec, name in ((self.a_ub, self.b_ub, "b_ub"), (self.a_eq, self.b_eq, "b_eq")):
            if (mat is None) != (vec is None):
                raise ValueError(f"{name} must accompany its matrix")
            if vec is not None:
                arr = np.asarray(vec, dtype=float)
                if len(arr) != mat.shape[0]:
                    raise ValueError(f"{name} length {len(arr)} != {mat.shape[0]} rows")
                if not np.all(np.isfinite(arr)):
                    raise ValueError(f"{name} contains non-finite entries")
        self.b_ub = None if self.b_ub is None else np.asarray(self.b_ub, dtype=float)
        self.b_eq = None if self.b_eq is None else np.asarray(self.b_eq, dtype=float)

    @property
    def n_vars(self) -> int:
        return len(self.c)


@dataclass
class LpSolution:
    status: str
    x: np.ndarray | None
    objective: float | None
    max_violation: float | None
    message: str = ""
    meta: dict = field(default_factory=dict)


def _row_scale(mat: sp.csr_matrix) -> np.ndarray:
    scale = np.ones(mat.shape[0])
    absmax = np.zeros(mat.shape[0])
    mat_abs = abs(mat)
    absmax = np.asarray(mat_abs.max(axis=1).todense()).ravel()
    nz = absmax > 0
    scale[nz] = 1.0 / absmax[nz]
    return scale


def solve_lp(problem: LpProblem, feasibility_tol: float = FEASIBILITY_TOL) -> LpSolution:
    """Solve with HiGHS after infinity-norm row equilibration.

    The reported max violation is recomputed on the returned point in the
    scaled system, so `status == "optimal"` guarantees it is at most the
    feasibility tolerance.
    """
    a_ub, b_ub = problem.a_ub, problem.b_ub
    a_eq, b_eq = problem.a_eq, problem.b_eq
    if a_ub is not None:
        s_ub = _row_scale(a_ub)
        a_ub = sp.diags(s_ub) @ a_ub
        b_ub = s_ub * b_ub
    if a_eq is not None:
        s_eq = _row_scale(a_eq)
        a_eq = sp.diags(s_eq) @ a_eq
        b_eq = s_eq * b_eq

    lower = problem.lower if problem.lower is not None else np.full(problem.n_vars, -np.inf)
    upper = problem.upper if problem.upper is not None else np.full(problem.n_vars, np.inf)
    bounds = list(zip(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)))

    # solver tolerances one order tighter than the contract so the recomputed
    # violation check below passes with margin
    options = {
        "primal_feasibility_tolerance": min(1e-9, feasibility_tol / 10),
        "dual_feasibility_tolerance": 1e-9,
    }
    res = linprog(problem.c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                  bounds=bounds, method="highs", options=options)

    status_map = {0: OPTIMAL, 1: NUMERICAL_FAILURE, 2: INFEASIBLE, 3: UNBOUNDED, 4: NUMERICAL_FAILURE}
    status = status_map.get(res.status, NUMERICAL_FAILURE)
    if status != OPTIMAL:
        return LpSolution(status=status, x=None, objective=None, max_violation=None,
                          message=str(res.message))

    x = np.asarray(res.x, dtype=float)
    violation = 0.0
    if a_ub is not None:
        violation = max(violation, float(np.max(a_ub @ x - b_ub, initial=0.0)))
    if a_eq is not None:
        violation = max(violation, float(np.max(np.abs(a_eq @ x - b_eq), initial=0.0)))
    if violation > feasibility_tol:
        return LpSolution(status=NUMERICAL_FAILURE, x=x, objective=float(res.fun),
                          max_violation=violation,
                          message=f"violation {violation:.3e} exceeds tolerance")
    return LpSolution(status=OPTIMAL, x=x, objective=float(res.fun),
                      max_violation=violation, message=str(res.message))
