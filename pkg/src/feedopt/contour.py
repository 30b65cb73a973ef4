"""Contour error: linearized estimate and exact orthogonal-distance oracle."""

from dataclasses import dataclass

import numpy as np

from feedopt.geometry import Toolpath

__all__ = ["ContourResult", "estimate_ce", "exact_ce"]


def estimate_ce(e_x, e_y, theta) -> np.ndarray:
    """Normal component of the tracking error: -sin(theta)*e_x + cos(theta)*e_y."""
    e_x = np.asarray(e_x, dtype=float)
    e_y = np.asarray(e_y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if not (len(e_x) == len(e_y) == len(theta)):
        raise ValueError("error and angle series must have equal lengths")
    return -np.sin(theta) * e_x + np.cos(theta) * e_y


def exact_ce(points, path: Toolpath) -> np.ndarray:
    """Signed orthogonal distance of each actual point to the path (mm).

    The sign follows the cross product of the unit tangent at the closest
    point with the vector from the actual point back to the path, matching the
    sign convention of the linearized estimate.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    out = np.empty(len(pts))
    for i, p in enumerate(pts):
        s_star, dist = path.nearest_point(p)
        qx, qy = path.eval(s_star)
        dx, dy = path.derivs(s_star, 1)
        norm = np.hypot(dx, dy)
        tx, ty = dx / norm, dy / norm
        cross = tx * (qy - p[1]) - ty * (qx - p[0])
        out[i] = np.sign(cross) * dist if cross != 0 else dist
    return out


@dataclass(frozen=True)
class ContourResult:
    """Estimated and exact contour-error series in micrometres."""

    estimated_um: np.ndarray
    exact_um: np.ndarray

    def __post_init__(self):
        if len(self.estimated_um) != len(self.exact_um):
            raise ValueError("series must have equal lengths")

    @property
    def max_estimated_um(self) -> float:
        return float(np.max(np.abs(self.estimated_um)))

    @property
    def max_exact_um(self) -> float:
        return float(np.max(np.abs(self.exact_um)))
