"""Trapezoidal-acceleration (seven-segment) trajectories and trajectory records.

TAP profiles are jerk-limited rest-to-rest motions along the path tangent.
They serve as the unoptimized benchmark and supply the sample horizon and
linearization points for the time-domain LP.
"""

from dataclasses import dataclass, field

import numpy as np

__all__ = ["KinematicLimits", "SevenSegmentProfile", "TrajectoryProfile", "tap_profile",
           "kinematics_series"]

DEFAULT_TAIL_FRACTION = 0.10


@dataclass(frozen=True)
class KinematicLimits:
    """Feedrate in mm/s, acceleration in m/s^2, jerk in m/s^3."""

    feedrate_mm_s: float
    accel_m_s2: float
    jerk_m_s3: float

    def __post_init__(self):
        if min(self.feedrate_mm_s, self.accel_m_s2, self.jerk_m_s3) <= 0:
            raise ValueError("kinematic limits must be strictly positive")

    @property
    def accel_mm(self) -> float:
        return self.accel_m_s2 * 1e3

    @property
    def jerk_mm(self) -> float:
        return self.jerk_m_s3 * 1e3


@dataclass(frozen=True)
class SevenSegmentProfile:
    """Closed-form jerk-limited tangential profile over a fixed distance.

    Segments: jerk up, hold accel, jerk down, cruise, jerk down, hold decel,
    jerk up.  Degenerate cases (peak accel or cruise unreachable) collapse the
    corresponding segments.
    """

    distance: float
    peak_speed: float
    jerk: float
    t_jerk: float
    t_accel: float
    t_cruise: float
    total_time: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "total_time", 4 * self.t_jerk + 2 * self.t_accel + self.t_cruise
        )

    @classmethod
    def plan(cls, distance: float, limits: KinematicLimits) -> "SevenSegmentProfile":
        if distance <= 0:
            raise ValueError("distance must be positive")
        f, a, j = limits.feedrate_mm_s, limits.accel_mm, limits.jerk_mm
        if f * j < a * a:          # peak accel not reachable before feedrate
            tj, ta = np.sqrt(f / j), 0.0
        else:
            tj, ta = a / j, f / a - a / j
        v = f
        if v * (ta + 2 * tj) > distance:   # no cruise: lower the peak speed
            tj = a / j
            v = 0.5 * a * (-tj + np.sqrt(tj * tj + 4 * distance / a))
            if v * j >= a * a:
                ta = v / a - tj
            else:
                v = (0.5 * distance * np.sqrt(j)) ** (2.0 / 3.0)
                tj, ta = np.sqrt(v / j), 0.0
        t_cruise = (distance - v * (ta + 2 * tj)) / v
        return cls(distance=distance, peak_speed=v, jerk=j,
                   t_jerk=tj, t_accel=ta, t_cruise=t_cruise)

    def _segments(self) -> list[tuple[float, float]]:
        j = self.jerk
        return [(self.t_jerk, j), (self.t_accel, 0.0), (self.t_jerk, -j),
                (self.t_cruise, 0.0),
                (self.t_jerk, -j), (self.t_accel, 0.0), (self.t_jerk, j)]

    def distance_at(self, t) -> np.ndarray:
        """Exact piecewise-cubic distance, clamped to the rest state after the end."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.full_like(t, self.distance)
        pos = vel = acc = 0.0
        t0 = 0.0
        for dur, jerk in self._segments():
            if dur <= 0:
                continue
            mask = (t >= t0) & (t < t0 + dur)
            tau = t[mask] - t0
            out[mask] = pos + vel * tau + 0.5 * acc * tau**2 + jerk * tau**3 / 6.0
            pos += vel * dur + 0.5 * acc * dur**2 + jerk * dur**3 / 6.0
            vel += acc * dur + 0.5 * jerk * dur**2
            acc += jerk * dur
            t0 += dur
        out[t < 0] = 0.0
        return out


@dataclass
class TrajectoryProfile:
    """Sampled trajectory: path parameter, commands and tangential kinematics."""

    sample_time: float
    s: np.ndarray
    x_d: np.ndarray
    y_d: np.ndarray
    x_dm: np.ndarray
    y_dm: np.ndarray
    feedrate: np.ndarray
    accel_x: np.ndarray
    accel_y: np.ndarray
    jerk_x: np.ndarray
    jerk_y: np.ndarray
    cycle_time: float

    def __post_init__(self):
        lengths = {len(self.s), len(self.x_d), len(self.y_d), len(self.x_dm),
                   len(self.y_dm), len(self.feedrate), len(self.accel_x),
                   len(self.accel_y), len(self.jerk_x), len(self.jerk_y)}
        if len(lengths) != 1:
            raise ValueError("profile series must have equal lengths")
        if np.any(np.diff(self.s) < -1e-12):
            raise ValueError("path parameter must be nondecreasing")

    @property
    def t(self) -> np.ndarray:
        return np.arange(len(self.s)) * self.sample_time


def _padded_diff(series: np.ndarray, order: int) -> np.ndarray:
    """Backward difference with the first sample replicated (rest history)."""
    from math import comb

    v = np.asarray(series, dtype=float)
    out = np.zeros_like(v)
    for j in range(order + 1):
        shifted = np.concatenate([np.full(j, v[0]), v[: len(v) - j]]) if j else v
        out += ((-1) ** j) * comb(order, j) * shifted
    return out


def kinematics_series(x: np.ndarray, y: np.ndarray, sample_time: float):
    """Feedrate and per-axis acceleration/jerk from sampled commands."""
    vx = _padded_diff(x, 1) / sample_time
    vy = _padded_diff(y, 1) / sample_time
    ax = _padded_diff(x, 2) / sample_time**2
    ay = _padded_diff(y, 2) / sample_time**2
    jx = _padded_diff(x, 3) / sample_time**3
    jy = _padded_diff(y, 3) / sample_time**3
    return np.hypot(vx, vy), ax, ay, jx, jy


def tap_profile(
    length: float,
    limits: KinematicLimits,
    sample_time: float,
    tail_fraction: float = DEFAULT_TAIL_FRACTION,
) -> tuple[np.ndarray, float]:
    """Sampled normalized arc length of a TAP move plus a dwell tail.

    Returns (s series, motion time).  The tail gives the LP initialized from
    this trajectory room to finish early; it holds s = 1.
    """
    plan = SevenSegmentProfile.plan(length, limits)
    n_motion = int(np.ceil(plan.total_time / sample_time)) + 1
    n_total = n_motion + int(round(tail_fraction * n_motion))
    t = np.arange(n_total) * sample_time
    s = plan.distance_at(t) / length
    return np.clip(s, 0.0, 1.0), plan.total_time


def profile_from_path(path, s: np.ndarray, sample_time: float, cycle_time: float,
                      x_dm: np.ndarray | None = None,
                      y_dm: np.ndarray | None = None) -> TrajectoryProfile:
    """Assemble a TrajectoryProfile by sampling the exact path at s."""
    x, y = path.eval(s)
    feed, ax, ay, jx, jy = kinematics_series(x, y, sample_time)
    return TrajectoryProfile(
        sample_time=sample_time, s=np.asarray(s, dtype=float),
        x_d=x, y_d=y,
        x_dm=x if x_dm is None else x_dm,
        y_dm=y if y_dm is None else y_dm,
        feedrate=feed, accel_x=ax, accel_y=ay, jerk_x=jx, jerk_y=jy,
        cycle_time=cycle_time,
    )
