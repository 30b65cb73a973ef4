"""Discrete-time LTI servo models, lifted operators and simulation.

Models are rational transfer functions in descending powers of z with a monic
denominator.  `lift` realizes the same dynamics as a lower-triangular Toeplitz
convolution operator over a finite horizon; `simulate` filters with zero
initial conditions.
"""

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import toeplitz
from scipy.signal import lfilter

__all__ = [
    "DiscreteTransferFunction",
    "LiftedOperator",
    "impulse_response",
    "simulate",
    "lift",
    "dc_gain",
    "normalize_dc",
    "reflect_unstable_poles",
    "condition_rounded_model",
]

_STABILITY_SLACK = 1e-9


@dataclass(frozen=True)
class DiscreteTransferFunction:
    """Proper rational model, coefficients in descending powers of z."""

    num: np.ndarray
    den: np.ndarray
    sample_time: float

    def __post_init__(self):
        num = np.atleast_1d(np.asarray(self.num, dtype=float))
        den = np.atleast_1d(np.asarray(self.den, dtype=float))
        if self.sample_time <= 0:
            raise ValueError("sample_time must be positive")
        if den[0] == 0:
            raise ValueError("denominator leading coefficient must be nonzero")
        if len(num) > len(den):
            raise ValueError("model must be proper (deg num <= deg den)")
        num = num / den[0]
        den = den / den[0]
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @cached_property
    def poles(self) -> np.ndarray:
        if len(self.den) == 1:
            return np.array([])
        return np.roots(self.den)

    @property
    def is_stable(self) -> bool:
        return bool(len(self.poles) == 0 or np.max(np.abs(self.poles)) <= 1.0 + _STABILITY_SLACK)

    def _lfilter_num(self) -> np.ndarray:
        # align descending-power arrays to lfilter's z^{-1} convention
        return np.concatenate([np.zeros(len(self.den) - len(self.num)), self.num])


def simulate(tf: DiscreteTransferFunction, inputs) -> np.ndarray:
    """Zero-initial-condition filtering of the input series."""
    u = np.asarray(inputs, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("input series must be finite")
    return lfilter(tf._lfilter_num(), tf.den, u)


def impulse_response(tf: DiscreteTransferFunction, n: int) -> np.ndarray:
    """First n samples of the unit-pulse response.

    An unstable model is flagged with a warning rather than rejected: published
    coefficient sets are often rounded and may sit marginally outside the unit
    circle.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not tf.is_stable:
        warnings.warn(
            "model has poles outside the unit circle (max |p| = "
            f"{np.max(np.abs(tf.poles)):.6f}); simulation will diverge",
            stacklevel=2,
        )
    pulse = np.zeros(n)
    pulse[0] = 1.0
    return simulate(tf, pulse)


@dataclass(frozen=True)
class LiftedOperator:
    """Lower-triangular Toeplitz convolution operator over an n-sample horizon."""

    impulse: np.ndarray

    @property
    def n(self) -> int:
        return len(self.impulse)

    def apply(self, u) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if len(u) != self.n:
            raise ValueError(f"input length {len(u)} != horizon {self.n}")
        return np.convolve(u, self.impulse)[: self.n]

    def matrix(self) -> np.ndarray:
        return toeplitz(self.impulse, np.zeros(self.n))


def lift(tf: DiscreteTransferFunction, n: int) -> LiftedOperator:
    return LiftedOperator(impulse=impulse_response(tf, n))


def dc_gain(tf: DiscreteTransferFunction) -> float:
    den1 = float(np.sum(tf.den))
    if abs(den1) < 1e-12:
        raise ValueError("denominator vanishes at z=1: DC gain ill-conditioned")
    return float(np.sum(tf.num)) / den1


def normalize_dc(tf: DiscreteTransferFunction) -> DiscreteTransferFunction:
    """Scale the numerator so the DC gain is exactly 1."""
    g = dc_gain(tf)
    if g == 0:
        raise ValueError("zero DC gain cannot be normalized")
    return DiscreteTransferFunction(tf.num / g, tf.den, tf.sample_time)


def reflect_unstable_poles(tf: DiscreteTransferFunction) -> DiscreteTransferFunction:
    """Replace poles outside the unit circle with their unit-circle mirrors.

    Reflection p -> 1/conj(p) preserves the magnitude response up to a
    constant factor, which a subsequent DC normalization absorbs.
    """
    p = tf.poles.astype(complex)
    bad = np.abs(p) > 1.0
    if not np.any(bad):
        return tf
    p[bad] = 1.0 / np.conj(p[bad])
    den = np.real(np.poly(p))
    return DiscreteTransferFunction(tf.num, den, tf.sample_time)


def _poly_at_one(c: np.ndarray, order: int) -> float:
    """Value of the order-th derivative of a descending-power polynomial at z=1."""
    n = len(c) - 1
    total = 0.0
    for i, ci in enumerate(c):
        p = n - i
        term = ci
        for r in range(order):
            term *= p - r
        total += term
    return float(total)


def condition_rounded_model(
    tf: DiscreteTransferFunction,
    accel_error_bandwidth_hz: float,
    damping_power: float = 1.0,
) -> DiscreteTransferFunction:
    """Repair a model whose published coefficients were rounded for print.

    Coefficient sets printed with 3-4 significant digits lose exactly the
    low-frequency information when the poles cluster near z=1: the poles can
    land outside the unit circle and the values of num/den at z=1 degenerate
    to differences of large terms.  This restores the structure an open-loop
    position transmission must have:

    * stability - unstable poles reflected inside, pole radii raised to
      ``damping_power`` (>1 damps the spurious ringing the reflection leaves);
    * unity DC gain and zero velocity-error coefficient (position output
      follows a constant-velocity command with no steady offset);
    * acceleration-error constant 1/(2*pi*f)^2 with f =
      ``accel_error_bandwidth_hz``, i.e. a sustained acceleration a produces a
      steady following error a/(2*pi*f)^2.

    The numerator is moved as little as possible: a rank-two least-norm
    correction enforces the first two moments and a (z-1)^2-shaped term sets
    the acceleration-error constant without touching them.
    """
    if accel_error_bandwidth_hz <= 0:
        raise ValueError("accel_error_bandwidth_hz must be positive")
    p = tf.poles.astype(complex)
    bad = np.abs(p) > 1.0
    p[bad] = 1.0 / np.conj(p[bad])
    p = np.abs(p) ** damping_power * np.exp(1j * np.angle(p))
    den = np.real(np.poly(p))

    num = tf.num.astype(float).copy()
    n = len(num) - 1
    if n < 2:
        raise ValueError("numerator degree must be >= 2 for conditioning")
    # moments: row 0 -> value at z=1, row 1 -> first derivative at z=1
    moment = np.vstack([
        np.ones(n + 1),
        np.array([n - i for i in range(n + 1)], dtype=float),
    ])
    rhs = np.array([
        _poly_at_one(den, 0) - _poly_at_one(num, 0),
        _poly_at_one(den, 1) - _poly_at_one(num, 1),
    ])
    delta, *_ = np.linalg.lstsq(moment, rhs, rcond=None)
    num = num + delta

    k_accel = 1.0 / (2.0 * np.pi * accel_error_bandwidth_hz) ** 2
    shaper = np.zeros(n + 1)
    shaper[0], shaper[1], shaper[2] = 1.0, -2.0, 1.0  # (z-1)^2 * z^(n-2)
    target = 2.0 * _poly_at_one(den, 0) * k_accel / tf.sample_time**2
    gamma = (_poly_at_one(den, 2) - _poly_at_one(num, 2) - target) / _poly_at_one(shaper, 2)
    num = num + gamma * shaper
    return DiscreteTransferFunction(num, den, tf.sample_time)
