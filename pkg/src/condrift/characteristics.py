"""Smooth-regime solver via the closed-form characteristic system.

Along the curve started at x0 the density value and position obey

    dU/dt = d * U^(1+gamma),          U(0) = f_I(x0),
    dX/dt = -(1+gamma) * X * U^gamma, X(0) = x0,

whose solution is explicit.  Works in any dimension d >= 1; for d >= 2 the
datum must be radial and the coordinate is the radius.  Everything here is
valid only before the first shock / blow-up time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .datum import InitialDatum
from .frames import GammaConfig

SHOCK_SCAN_FEET = 4096
SHOCK_REFINE_TOL = 1e-6


class BlowUpReached(RuntimeError):
    """Requested time is at or past the blow-up time of this characteristic."""


class ZeroDatum(ValueError):
    """Operation requires a datum with positive sup."""


class NotSmoothRegime(RuntimeError):
    """Requested time is past the smooth-solution validity window."""


@dataclass(frozen=True)
class CharacteristicState:
    """Foot x0, current position X_{x0}(t), value U_{x0}(t), and time."""

    x0: float
    position: float
    value: float
    time: float


def advance(x0: float, t: float, datum: InitialDatum, cfg: GammaConfig) -> CharacteristicState:
    """Closed-form characteristic state at time t for the foot x0."""
    g, d = cfg.gamma, cfg.dim
    u0 = float(datum(x0))
    if u0 == 0.0:
        return CharacteristicState(x0=x0, position=x0, value=0.0, time=t)
    shrink = 1.0 - g * d * u0**g * t
    if shrink <= 0.0:
        raise BlowUpReached(
            f"characteristic from x0={x0} blows up at t={1.0 / (g * d * u0**g)}"
        )
    return CharacteristicState(
        x0=x0,
        position=x0 * shrink ** ((1 + g) / (g * d)),
        value=u0 / shrink ** (1 / g),
        time=t,
    )


def blow_up_time(datum: InitialDatum, cfg: GammaConfig) -> float:
    """t* = 1 / (gamma * d * (sup f_I)^gamma).

    Exact smooth-breakdown time for radially non-increasing data; otherwise
    an upper bound (a shock may form earlier, see :func:`first_shock_time`).
    """
    if datum.sup_value <= 0:
        raise ZeroDatum("blow-up time undefined for an identically zero datum")
    return 1.0 / (cfg.gamma * cfg.dim * datum.sup_value**cfg.gamma)


def first_shock_time(datum: InitialDatum, cfg: GammaConfig) -> float:
    """Earliest crossing time of 1-D characteristics, or inf if none before blow-up.

    The Jacobian of the foot-to-position map vanishes first at

        t(x0) = 1 / (gamma*f^gamma + (1+gamma)*x0*(f^gamma)'(x0)),

    which undercuts the local blow-up time exactly where x0*(f^gamma)' > 0.
    Feet are scanned on a fine grid with local bisection refinement, so the
    result is approximate at the SHOCK_REFINE_TOL scale.
    """
    if cfg.dim != 1:
        raise ValueError("shock detection is implemented for dim = 1 only")
    lo, hi = datum.a, datum.b
    pad = 1e-9 * (hi - lo)
    feet = np.linspace(lo + pad, hi - pad, SHOCK_SCAN_FEET)

    def candidate_times(x0):
        f = np.asarray(datum(x0), dtype=float)
        fp = np.asarray(datum.deriv(x0), dtype=float)
        g = cfg.gamma
        with np.errstate(divide="ignore", invalid="ignore"):
            fg_prime = np.where(f > 0, g * f ** (g - 1) * fp, 0.0)
            denom = g * f**g + (1 + g) * x0 * fg_prime
            times = np.where(
                (x0 * fg_prime > 0) & np.isfinite(denom) & (denom > 0),
                1.0 / denom,
                np.inf,
            )
        return times

    times = candidate_times(feet)
    best = float(np.min(times))
    if not np.isfinite(best):
        return math.inf
    # bisection-style refinement around the best foot
    idx = int(np.argmin(times))
    left = feet[max(idx - 1, 0)]
    right = feet[min(idx + 1, feet.size - 1)]
    while right - left > 0:
        sub = np.linspace(left, right, 17)
        sub_t = candidate_times(sub)
        j = int(np.argmin(sub_t))
        new_best = float(sub_t[j])
        improved = best - new_best
        best = min(best, new_best)
        left, right = sub[max(j - 1, 0)], sub[min(j + 1, sub.size - 1)]
        if improved < SHOCK_REFINE_TOL * max(best, 1.0):
            break
    return best


def smooth_horizon(datum: InitialDatum, cfg: GammaConfig) -> float:
    """min(blow-up time, first shock time); cached per (gamma, dim) on the datum."""
    key = (cfg.gamma, cfg.dim)
    if key not in datum._shock_cache:
        horizon = blow_up_time(datum, cfg)
        if cfg.dim == 1:
            horizon = min(horizon, first_shock_time(datum, cfg))
        datum._shock_cache[key] = horizon
    return datum._shock_cache[key]


def evaluate_smooth(x: float, t: float, datum: InitialDatum, cfg: GammaConfig) -> float:
    """Density value at (x, t) in the smooth regime.

    Recovers the foot x0 by root-finding on
    F(x0) = x0 * (1 - gamma*d*f^gamma(x0)*t)^((1+gamma)/(gamma*d)) - x
    and returns the characteristic value there.  Points clearly outside the
    evolved support return 0.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t >= smooth_horizon(datum, cfg):
        raise NotSmoothRegime(
            f"t={t} is past the smooth horizon {smooth_horizon(datum, cfg)}"
        )
    if t == 0.0:
        return float(datum(x))
    if x == 0.0:
        return advance(0.0, t, datum, cfg).value
    g, d = cfg.gamma, cfg.dim

    def foot_map(x0):
        u0 = float(datum(x0))
        return x0 * (1.0 - g * d * u0**g * t) ** ((1 + g) / (g * d))

    if x > 0:
        lo, hi = 0.0, max(datum.b, x)
    else:
        lo, hi = min(datum.a, x), 0.0
    f_lo = foot_map(lo) - x
    f_hi = foot_map(hi) - x
    if f_lo * f_hi > 0:
        return 0.0  # outside the evolved support
    x0 = brentq(lambda s: foot_map(s) - x, lo, hi, xtol=1e-12, rtol=8.9e-16)
    return advance(float(x0), t, datum, cfg).value


def evaluate_smooth_grid(xs, t: float, datum: InitialDatum, cfg: GammaConfig) -> np.ndarray:
    """Vectorized :func:`evaluate_smooth` over a coordinate array."""
    return np.array([evaluate_smooth(float(x), t, datum, cfg) for x in np.asarray(xs)])
