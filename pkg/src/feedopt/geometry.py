"""Planar toolpaths parametrized by normalized arc length s in [0, 1].

Both path types expose positions, exact geometric derivatives up to third
order, tangent angles, and a closest-point search used as the exact
contour-error oracle.  All coordinates are millimetres.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import BSpline, PchipInterpolator
from scipy.optimize import minimize_scalar

from feedopt.errors import GeometryError

__all__ = ["Toolpath", "CirclePath", "SplinePath", "make_path"]

_DENSE_SAMPLES = 4096
_NEAREST_TOL_MM = 1e-9
_REPARAM_NODES = 2048


def _check_s(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if np.any(s < -1e-12) or np.any(s > 1 + 1e-12):
        raise ValueError("path parameter s must lie in [0, 1]")
    return np.clip(s, 0.0, 1.0)


class Toolpath:
    """Shared interface: eval/derivs/tangent_angle/nearest_point."""

    length: float

    def eval(self, s) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def derivs(self, s, order: int) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def tangent_angle(self, s) -> np.ndarray:
        dx, dy = self.derivs(s, 1)
        speed = np.hypot(dx, dy)
        if np.any(speed <= 0):
            raise GeometryError("zero tangent vector on the path")
        return np.arctan2(dy, dx)

    @cached_property
    def _dense_table(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        s = np.linspace(0.0, 1.0, _DENSE_SAMPLES)
        x, y = self.eval(s)
        return s, x, y

    def nearest_point(self, point) -> tuple[float, float]:
        """Closest-point parameter and distance (mm).

        Dense sampling followed by bounded local refinement; ties broken
        toward the smallest s so the oracle is deterministic.
        """
        px, py = float(point[0]), float(point[1])
        s_grid, x, y = self._dense_table
        d2 = (x - px) ** 2 + (y - py) ** 2
        k = int(np.argmin(d2))
        lo = s_grid[max(k - 1, 0)]
        hi = s_grid[min(k + 1, len(s_grid) - 1)]

        def dist2(s):
            ex, ey = self.eval(s)
            return (ex - px) ** 2 + (ey - py) ** 2

        res = minimize_scalar(dist2, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14})
        s_best, d_best = float(res.x), float(np.sqrt(res.fun))
        # tie-break: prefer the smallest s among equally-near candidates
        d_min = np.sqrt(d2.min())
        for idx in np.nonzero(np.sqrt(d2) <= d_min + _NEAREST_TOL_MM)[0]:
            if idx == k:
                continue
            lo_i = s_grid[max(idx - 1, 0)]
            hi_i = s_grid[min(idx + 1, len(s_grid) - 1)]
            r = minimize_scalar(dist2, bounds=(lo_i, hi_i), method="bounded",
                                options={"xatol": 1e-14})
            if (np.sqrt(r.fun) < d_best - _NEAREST_TOL_MM or
                    (np.sqrt(r.fun) <= d_best + _NEAREST_TOL_MM and r.x < s_best)):
                s_best, d_best = float(r.x), float(np.sqrt(r.fun))
        return s_best, d_best


@dataclass
class CirclePath(Toolpath):
    """Circular arc, counterclockwise for positive sweep, from start_angle."""

    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 5.0
    start_angle: float = 0.0
    sweep: float = 2.0 * np.pi
    length: float = field(init=False)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.sweep == 0:
            raise ValueError("sweep must be nonzero")
        self.length = abs(self.sweep) * self.radius

    def _angle(self, s):
        return self.start_angle + self.sweep * np.asarray(s, dtype=float)

    def eval(self, s):
        a = self._angle(_check_s(s))
        return (self.center[0] + self.radius * np.cos(a),
                self.center[1] + self.radius * np.sin(a))

    def derivs(self, s, order: int):
        if order not in (1, 2, 3):
            raise ValueError("derivative order must be 1, 2 or 3")
        a = self._angle(_check_s(s))
        w = self.sweep
        r = self.radius
        if order == 1:
            return -r * w * np.sin(a), r * w * np.cos(a)
        if order == 2:
            return -r * w**2 * np.cos(a), -r * w**2 * np.sin(a)
        return r * w**3 * np.sin(a), -r * w**3 * np.cos(a)


class SplinePath(Toolpath):
    """Planar B-spline curve reparametrized to normalized arc length.

    The native parameter u spans [0, 1]; cumulative arc length is integrated
    with adaptive quadrature and inverted with a monotone cubic interpolant on
    a fixed node grid, after which s-derivatives follow from the chain rule.
    """

    def __init__(self, control_points, degree: int, knots=None):
        pts = np.asarray(control_points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) < degree + 1:
            raise ValueError("need at least degree+1 planar control points")
        if knots is None:
            interior = np.linspace(0.0, 1.0, len(pts) - degree + 1)
            knots = np.concatenate([np.zeros(degree), interior, np.ones(degree)])
        knots = np.asarray(knots, dtype=float)
        self.degree = int(degree)
        self.control_points = pts
        self.knots = knots
        self._curve = BSpline(knots, pts, self.degree, extrapolate=True)
        self._d1 = self._curve.derivative(1)
        self._d2 = self._curve.derivative(2)
        self._d3 = self._curve.derivative(3) if self.degree >= 3 else None
        self._build_arclength_map()

    def _speed(self, u):
        d = np.atleast_2d(self._d1(u))
        return np.hypot(d[:, 0], d[:, 1])

    def _build_arclength_map(self):
        u_nodes = np.linspace(0.0, 1.0, _REPARAM_NODES)
        seg = np.empty(_REPARAM_NODES - 1)
        f = lambda u: float(self._speed(np.asarray([u]))[0])
        for i in range(_REPARAM_NODES - 1):
            seg[i], _ = quad(f, u_nodes[i], u_nodes[i + 1], epsrel=1e-9, epsabs=1e-13)
        arclen = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(arclen[-1])
        if self.length <= 0:
            raise GeometryError("degenerate spline path with zero length")
        s_nodes = arclen / self.length
        s_nodes[-1] = 1.0
        # strictly increasing guard for the inverse interpolant
        s_nodes = np.maximum.accumulate(s_nodes)
        keep = np.concatenate([[True], np.diff(s_nodes) > 1e-15])
        keep[-1] = True
        self._u_of_s = PchipInterpolator(s_nodes[keep], u_nodes[keep])

    def _u(self, s):
        return np.clip(self._u_of_s(_check_s(s)), 0.0, 1.0)

    def eval(self, s):
        p = np.atleast_2d(self._curve(self._u(s)))
        x, y = p[:, 0], p[:, 1]
        if np.isscalar(s) or np.asarray(s).ndim == 0:
            return float(x[0]), float(y[0])
        return x, y

    def derivs(self, s, order: int):
        if order not in (1, 2, 3):
            raise ValueError("derivative order must be 1, 2 or 3")
        if order == 3 and self._d3 is None:
            raise ValueError("third derivative needs spline degree >= 3")
        u = np.atleast_1d(self._u(s))
        L = self.length
        c1 = np.atleast_2d(self._d1(u))
        v = np.hypot(c1[:, 0], c1[:, 1])
        if np.any(v <= 0):
            raise GeometryError("zero native speed on the spline path")
        du = L / v
        if order == 1:
            out = c1 * du[:, None]
        else:
            c2 = np.atleast_2d(self._d2(u))
            vdot = (c1[:, 0] * c2[:, 0] + c1[:, 1] * c2[:, 1]) / v
            d2u = -(L**2) * vdot / v**3
            if order == 2:
                out = c2 * (du**2)[:, None] + c1 * d2u[:, None]
            else:
                c3 = np.atleast_2d(self._d3(u))
                w2 = c2[:, 0] ** 2 + c2[:, 1] ** 2
                cdot3 = c1[:, 0] * c3[:, 0] + c1[:, 1] * c3[:, 1]
                cdot2 = c1[:, 0] * c2[:, 0] + c1[:, 1] * c2[:, 1]
                d3u = -(L**3) * ((w2 + cdot3) / v**5 - 4.0 * cdot2**2 / v**7)
                out = (c3 * (du**3)[:, None]
                       + 3.0 * c2 * (du * d2u)[:, None]
                       + c1 * d3u[:, None])
        x, y = out[:, 0], out[:, 1]
        if np.isscalar(s) or np.asarray(s).ndim == 0:
            return float(x[0]), float(y[0])
        return x, y


def make_path(kind: str, **params) -> Toolpath:
    """Construct a toolpath from config-level parameters."""
    if kind == "circle":
        return CirclePath(
            center=tuple(params.get("center", (0.0, 0.0))),
            radius=float(params["radius"]),
            start_angle=float(params.get("start_angle", 0.0)),
            sweep=float(params.get("sweep", 2.0 * np.pi)),
        )
    if kind == "spline":
        return SplinePath(
            control_points=params["control_points"],
            degree=int(params.get("degree", 3)),
            knots=params.get("knots"),
        )
    raise ValueError(f"unknown path kind {kind!r}")
