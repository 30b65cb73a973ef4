"""B-spline basis machinery shared by the compensator and both LP formulations.

Basis functions follow the Cox-de Boor recursion with the 0/0 convention
(terms with a zero knot span evaluate to zero).  The sampled basis matrix maps
a control-point vector to samples on a uniform parameter grid; derivative
matrices make first/second/third parametric derivatives linear in the control
points.
"""

from dataclasses import dataclass

import numpy as np

__all__ = ["KnotVector", "basis_value", "basis_matrix", "derivative_basis_matrix"]


@dataclass(frozen=True)
class KnotVector:
    """Nondecreasing knots on [0, 1] for ``n`` basis functions of ``degree``."""

    degree: int
    knots: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        object.__setattr__(self, "knots", knots)
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        if knots.ndim != 1 or len(knots) < 2 * (self.degree + 1):
            raise ValueError("knot vector too short for degree")
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be nondecreasing")
        if abs(knots[0]) > 1e-15 or abs(knots[-1] - 1.0) > 1e-15:
            raise ValueError("knots must start at 0 and end at 1")

    @property
    def n(self) -> int:
        """Number of basis functions."""
        return len(self.knots) - self.degree - 1

    @classmethod
    def clamped_uniform(cls, n: int, degree: int) -> "KnotVector":
        """End knots repeated degree+1 times, interior knots equally spaced.

        Clamping makes the basis interpolate at both ends, which the exact
        endpoint constraints of the optimizers require.
        """
        if n < degree + 1:
            raise ValueError("need at least degree+1 control points")
        interior = np.linspace(0.0, 1.0, n - degree + 1)
        knots = np.concatenate([np.zeros(degree), interior, np.ones(degree)])
        return cls(degree=degree, knots=knots)

    @classmethod
    def uniform(cls, n: int, degree: int) -> "KnotVector":
        """Strictly uniform (unclamped) knots.

        Partition of unity then holds only on the interior span range
        [knots[degree], knots[n]]; kept as a switch because clamping is a
        modelling choice, not a mathematical necessity.
        """
        if n < degree + 1:
            raise ValueError("need at least degree+1 control points")
        return cls(degree=degree, knots=np.linspace(0.0, 1.0, n + degree + 1))


def _degree_zero(knots: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """Indicator functions over knot spans; the last nonempty span is closed
    on the right so that zeta=1 belongs to a span."""
    n_spans = len(knots) - 1
    out = np.zeros((len(zeta), n_spans))
    last = knots[-1]
    for i in range(n_spans):
        lo, hi = knots[i], knots[i + 1]
        if hi <= lo:
            continue
        if hi >= last:
            out[:, i] = (zeta >= lo) & (zeta <= hi)
        else:
            out[:, i] = (zeta >= lo) & (zeta < hi)
    return out


def _raise_degree(values: np.ndarray, knots: np.ndarray, degree: int, zeta: np.ndarray) -> np.ndarray:
    """One Cox-de Boor step from degree-1 values to `degree` values."""
    cur = values.shape[1]
    out = np.zeros((values.shape[0], cur - 1))
    for i in range(cur - 1):
        acc = np.zeros(values.shape[0])
        d1 = knots[i + degree] - knots[i]
        if d1 > 0:
            acc += (zeta - knots[i]) / d1 * values[:, i]
        d2 = knots[i + degree + 1] - knots[i + 1]
        if d2 > 0:
            acc += (knots[i + degree + 1] - zeta) / d2 * values[:, i + 1]
        out[:, i] = acc
    return out


def _basis_columns(knots: np.ndarray, degree: int, zeta: np.ndarray) -> np.ndarray:
    values = _degree_zero(knots, zeta)
    for d in range(1, degree + 1):
        values = _raise_degree(values, knots, d, zeta)
    return values


def basis_value(kv: KnotVector, j: int, zeta: float) -> float:
    """Single basis function N_{j,degree} at zeta via the recursion."""
    if not 0 <= j < kv.n:
        raise ValueError(f"basis index {j} out of range [0, {kv.n})")
    if not 0.0 <= zeta <= 1.0:
        raise ValueError("zeta must lie in [0, 1]")
    cols = _basis_columns(kv.knots, kv.degree, np.asarray([float(zeta)]))
    return float(cols[0, j])


def basis_matrix(kv: KnotVector, n_rows: int) -> np.ndarray:
    """Sampled basis matrix on the uniform grid zeta_k = k/(n_rows-1).

    Row k holds all basis values at zeta_k, so (matrix @ control_points)
    samples the spline.  Requires n_rows >= n, otherwise a least-squares fit
    against the matrix would be underdetermined.
    """
    if n_rows < kv.n:
        raise ValueError(f"n_rows={n_rows} < {kv.n} basis functions: rank-deficient sampling")
    zeta = np.linspace(0.0, 1.0, n_rows)
    return _basis_columns(kv.knots, kv.degree, zeta)


def derivative_basis_matrix(kv: KnotVector, order: int, n_rows: int) -> np.ndarray:
    """Sampled matrix of d^order/dzeta^order of each basis function.

    Built from the derivative ladder: the order-th derivative of a degree-m
    basis is a signed combination of degree-(m-order) basis values on the same
    knots.
    """
    if not 1 <= order <= 3:
        raise ValueError("order must be 1, 2 or 3")
    if order > kv.degree:
        raise ValueError(f"order {order} exceeds spline degree {kv.degree}")
    if n_rows < kv.n:
        raise ValueError(f"n_rows={n_rows} < {kv.n} basis functions: rank-deficient sampling")
    zeta = np.linspace(0.0, 1.0, n_rows)
    knots = kv.knots
    values = _basis_columns(knots, kv.degree - order, zeta)
    for step in range(order):
        d = kv.degree - order + 1 + step
        cur = values.shape[1]
        out = np.zeros((values.shape[0], cur - 1))
        for i in range(cur - 1):
            acc = np.zeros(values.shape[0])
            d1 = knots[i + d] - knots[i]
            if d1 > 0:
                acc += d / d1 * values[:, i]
            d2 = knots[i + d + 1] - knots[i + 1]
            if d2 > 0:
                acc -= d / d2 * values[:, i + 1]
            out[:, i] = acc
        values = out
    return values
