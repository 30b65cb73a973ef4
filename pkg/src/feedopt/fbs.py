"""Filtered-basis feedforward compensator.

The modified command is parametrized as a B-spline over normalized time; its
control points are chosen so the model-filtered spline matches the desired
trajectory in the least-squares sense.  The resulting linear operator
C = N (G N)^+ pre-compensates commands and enters the contour-error
constraint of the time-domain LP.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import qr, solve_triangular

from feedopt.dynamics import DiscreteTransferFunction, simulate
from feedopt.errors import FbsBuildError, OperatorSizeError
from feedopt.splines import KnotVector, basis_matrix

__all__ = ["Compensator", "build_compensator", "compensate", "operator_matrix"]

MAX_COND = 1e12
DEFAULT_OPERATOR_CAP = 20000


@dataclass(frozen=True)
class Compensator:
    """Immutable once built; application is pure."""

    model: DiscreteTransferFunction
    basis: np.ndarray         # n_rows x n
    filtered: np.ndarray      # model-filtered basis, same shape
    q_factor: np.ndarray
    r_factor: np.ndarray
    condition_number: float

    @property
    def n_rows(self) -> int:
        return self.basis.shape[0]

    @property
    def n_control(self) -> int:
        return self.basis.shape[1]


def build_compensator(
    model: DiscreteTransferFunction,
    n_rows: int,
    n_control: int,
    degree: int,
) -> Compensator:
    """Filter each basis column through the model and factorize the result."""
    if n_rows < n_control:
        raise ValueError("n_rows must be >= n_control")
    if degree < 1:
        raise ValueError("degree must be >= 1")
    kv = KnotVector.clamped_uniform(n_control, degree)
    basis = basis_matrix(kv, n_rows)
    filtered = np.column_stack([simulate(model, basis[:, j]) for j in range(n_control)])
    cond = float(np.linalg.cond(filtered))
    if not np.isfinite(cond) or cond > MAX_COND:
        raise FbsBuildError(
            f"filtered basis is rank deficient (condition number {cond:.3e}); "
            "reduce the number of control points"
        )
    q_fac, r_fac = qr(filtered, mode="economic")
    return Compensator(model=model, basis=basis, filtered=filtered,
                       q_factor=q_fac, r_factor=r_fac, condition_number=cond)


def compensate(comp: Compensator, desired) -> np.ndarray:
    """Modified command N p*, with p* the least-squares fit of the filtered basis."""
    x = np.asarray(desired, dtype=float)
    if len(x) != comp.n_rows:
        raise ValueError(f"series length {len(x)} != basis rows {comp.n_rows}")
    p_star = solve_triangular(comp.r_factor, comp.q_factor.T @ x)
    return comp.basis @ p_star


def operator_matrix(comp: Compensator, cap: int = DEFAULT_OPERATOR_CAP) -> np.ndarray:
    """Dense n_rows x n_rows operator; refused above the memory cap."""
    if comp.n_rows > cap:
        raise OperatorSizeError(
            f"dense operator would be {comp.n_rows}x{comp.n_rows}; "
            f"cap is {cap} rows (raise the cap explicitly to override)"
        )
    pinv = np.linalg.pinv(comp.filtered)
    return comp.basis @ pinv
