"""Coordinate, time, and amplitude scalings between the three frames.

Three frames are used throughout:

* ``original``:  (v, tau, f)  -- the confined dynamics with linear drift,
* ``driftfree``: (x, t, rho)  -- drift removed, homogeneous nonlinearity,
* ``conslaw``:   (xi, t, u)   -- scalar conservation-law coordinates.

All maps here are pure functions of their value inputs and preserve total
mass; they are safe to call concurrently.  The ``conslaw`` spatial map is
one-dimensional only; the time/amplitude map works in any dimension.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FRAMES = ("original", "driftfree", "conslaw")


@dataclass(frozen=True)
class GammaConfig:
    """Nonlinearity exponent gamma > 0 and spatial dimension d >= 1.

    gamma values far outside [0.2, 4] are valid but numerically stiff:
    the coordinate maps carry exponents 1/gamma and (1+gamma)/gamma.
    """

    gamma: float
    dim: int = 1

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")


@dataclass(frozen=True)
class FramePoint:
    """A single density sample (coordinate, time, amplitude) in one frame."""

    coordinate: float
    time: float
    amplitude: float
    frame: str

    def __post_init__(self):
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")
        if self.frame not in FRAMES:
            raise ValueError(f"unknown frame {self.frame!r}, expected one of {FRAMES}")


def time_original_to_driftfree(tau, cfg: GammaConfig):
    """t = (exp(d*gamma*tau) - 1)/(d*gamma); strictly increasing on [0, inf)."""
    a = cfg.dim * cfg.gamma
    return np.expm1(a * np.asarray(tau, dtype=float)) / a


def time_driftfree_to_original(t, cfg: GammaConfig):
    """Inverse time map, tau = log(1 + d*gamma*t)/(d*gamma)."""
    a = cfg.dim * cfg.gamma
    return np.log1p(a * np.asarray(t, dtype=float)) / a


def density_original_to_driftfree(p: FramePoint, cfg: GammaConfig) -> FramePoint:
    """Map an (v, tau, f) sample to (x, t, rho); mass preserving."""
    if p.frame != "original":
        raise ValueError(f"expected an 'original'-frame point, got {p.frame!r}")
    tau = p.time
    return FramePoint(
        coordinate=float(np.exp(tau) * p.coordinate),
        time=float(time_original_to_driftfree(tau, cfg)),
        amplitude=float(np.exp(-cfg.dim * tau) * p.amplitude),
        frame="driftfree",
    )


def density_driftfree_to_original(p: FramePoint, cfg: GammaConfig) -> FramePoint:
    """Inverse of :func:`density_original_to_driftfree`."""
    if p.frame != "driftfree":
        raise ValueError(f"expected a 'driftfree'-frame point, got {p.frame!r}")
    tau = float(time_driftfree_to_original(p.time, cfg))
    return FramePoint(
        coordinate=float(np.exp(-tau) * p.coordinate),
        time=tau,
        amplitude=float(np.exp(cfg.dim * tau) * p.amplitude),
        frame="original",
    )


def x_of_xi(xi, cfg: GammaConfig):
    """Spatial map x(xi) = sign(xi) * (gamma*|xi|)^((1+gamma)/gamma) / (1+gamma).

    Odd, strictly increasing, C^1 away from 0.  One-dimensional only.
    """
    _require_1d(cfg)
    g = cfg.gamma
    xi = np.asarray(xi, dtype=float)
    return np.sign(xi) * (g * np.abs(xi)) ** ((1 + g) / g) / (1 + g)


def xi_of_x(x, cfg: GammaConfig):
    """Inverse spatial map xi(x) = sign(x) * ((1+gamma)*|x|)^(gamma/(1+gamma)) / gamma."""
    _require_1d(cfg)
    g = cfg.gamma
    x = np.asarray(x, dtype=float)
    return np.sign(x) * ((1 + g) * np.abs(x)) ** (g / (1 + g)) / g


def dx_dxi(xi, cfg: GammaConfig):
    """x'(xi) = (gamma*|xi|)^(1/gamma); amplitude factor of the xi -> x map."""
    _require_1d(cfg)
    g = cfg.gamma
    return (g * np.abs(np.asarray(xi, dtype=float))) ** (1 / g)


def dxi_dx(x, cfg: GammaConfig):
    """xi'(x) = ((1+gamma)*|x|)^(-1/(1+gamma)); rejects x = 0.

    The map is singular at the origin; the origin carries the concentrated
    mass and is owned by the measure layer, never by this scaling.
    """
    _require_1d(cfg)
    x = np.asarray(x, dtype=float)
    if np.any(x == 0):
        raise ValueError("dxi_dx is singular at x = 0")
    g = cfg.gamma
    return ((1 + g) * np.abs(x)) ** (-1 / (1 + g))


def u_to_rho(u_value, x, cfg: GammaConfig):
    """rho(x) = xi'(x) * u(xi(x)); rejects x = 0."""
    u_value = np.asarray(u_value, dtype=float)
    if np.any(u_value < 0):
        raise ValueError("u must be nonnegative")
    return dxi_dx(x, cfg) * u_value


def rho_to_u(rho_value, xi, cfg: GammaConfig):
    """u(xi) = x'(xi) * rho(x(xi)); inverse of :func:`u_to_rho`."""
    rho_value = np.asarray(rho_value, dtype=float)
    if np.any(rho_value < 0):
        raise ValueError("rho must be nonnegative")
    return dx_dxi(xi, cfg) * rho_value


def _require_1d(cfg: GammaConfig):
    if cfg.dim != 1:
        raise ValueError("the conservation-law spatial map is one-dimensional only")
