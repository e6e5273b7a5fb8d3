"""Godunov finite-volume solver for the half-line conservation laws.

Both half-line problems are reflected onto the single canonical form

    u_t - (u^(1+gamma)/(1+gamma))_xi = 0,   xi > 0,

whose wave speeds -u^gamma are nonpositive: everything drifts toward the
origin and leaves through xi = 0.  The scheme is the first-order monotone
Godunov update; since the flux is monotone in u and all speeds share one
sign, the interface flux is pure upwinding from the right cell.  No
boundary condition is imposed at xi = 0 (outflow only); the ghost cell
copies the boundary cell.  Mass leaving through the origin accumulates in
``outflux_ledger`` so that the discrete total is conserved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .datum import InitialDatum, integrate_piecewise
from .frames import GammaConfig, x_of_xi, xi_of_x

EPS_SPEED = 1e-14
CLIP_TOL = 1e-13
GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(8)


class SupportOverflow(ValueError):
    """The xi-image of the datum support does not fit on the grid."""


class CflViolation(ValueError):
    """CFL number outside (0, 1]."""


@dataclass(frozen=True)
class HalfLineGrid:
    """Uniform cell grid covering (0, L] in canonical coordinates."""

    cell_count: int
    cell_width: float

    def __post_init__(self):
        if self.cell_count < 8:
            raise ValueError("need at least 8 cells")
        if not self.cell_width > 0:
            raise ValueError("cell width must be positive")

    @property
    def extent(self) -> float:
        return self.cell_count * self.cell_width

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.cell_count) + 0.5) * self.cell_width

    @property
    def edges(self) -> np.ndarray:
        return np.arange(self.cell_count + 1) * self.cell_width


@dataclass
class HalfLineState:
    """Cell averages of u on one (reflected) half-line plus origin bookkeeping.

    ``orientation`` records which original half-line this state represents;
    "right" evolves on xi > 0 as-is, "left" has been reflected xi -> -xi.
    """

    grid: HalfLineGrid
    cells: np.ndarray
    time: float = 0.0
    orientation: str = "right"
    outflux_ledger: float = 0.0
    sup_initial: float = 0.0
    trace_times: list = field(default_factory=list)
    trace_values: list = field(default_factory=list)

    def __post_init__(self):
        if self.orientation not in ("left", "right"):
            raise ValueError(f"orientation must be 'left' or 'right', got {self.orientation!r}")
        self.cells = np.asarray(self.cells, dtype=float)
        if self.cells.shape != (self.grid.cell_count,):
            raise ValueError("cells shape does not match the grid")
        if np.any(self.cells < 0):
            raise ValueError("cell averages must be nonnegative")
        if not self.trace_times:
            self.trace_times.append(self.time)
            self.trace_values.append(float(self.cells[0]))
        if self.sup_initial == 0.0:
            self.sup_initial = float(self.cells.max(initial=0.0))

    def copy(self) -> "HalfLineState":
        return HalfLineState(
            grid=self.grid,
            cells=self.cells.copy(),
            time=self.time,
            orientation=self.orientation,
            outflux_ledger=self.outflux_ledger,
            sup_initial=self.sup_initial,
            trace_times=list(self.trace_times),
            trace_values=list(self.trace_values),
        )

    @property
    def mass(self) -> float:
        """Discrete mass remaining on this half-line."""
        return float(self.cells.sum()) * self.grid.cell_width

    @property
    def trace(self) -> float:
        """Current boundary value u(0, t), read from the first cell."""
        return float(self.cells[0])


def xi_extent_of_datum(datum: InitialDatum, cfg: GammaConfig) -> float:
    """Largest |xi| in the image of the datum support."""
    reach = max(abs(datum.a), abs(datum.b))
    return float(abs(xi_of_x(reach, cfg)))


def make_grid(datum: InitialDatum, cfg: GammaConfig, cell_count: int,
              margin: float = 1.1) -> HalfLineGrid:
    """Grid sized to ``margin`` times the xi-image of the datum support."""
    extent = margin * xi_extent_of_datum(datum, cfg)
    if extent <= 0:
        raise ValueError("datum support has empty xi-image")
    return HalfLineGrid(cell_count=cell_count, cell_width=extent / cell_count)


def _cell_averages(datum: InitialDatum, grid: HalfLineGrid, cfg: GammaConfig,
                   sign: float) -> np.ndarray:
    """Cell averages of u_I(xi) = (gamma*xi)^(1/gamma) * f(sign * x(xi)).

    For piecewise data the integral over each cell equals the exact datum
    mass over the cell's x-image, so the averages are exact; general
    callables fall back to 8-point Gauss quadrature per cell.
    """
    edges = grid.edges
    if datum.kind in ("constant", "linear"):
        x_edges = np.asarray(x_of_xi(edges, cfg))
        masses = np.array([
            integrate_piecewise(datum,
                                min(sign * x_lo, sign * x_hi),
                                max(sign * x_lo, sign * x_hi))
            for x_lo, x_hi in zip(x_edges[:-1], x_edges[1:])
        ])
        return masses / grid.cell_width
    g = cfg.gamma
    lo = edges[:-1][:, None]
    hi = edges[1:][:, None]
    nodes = 0.5 * (hi - lo) * GAUSS_NODES[None, :] + 0.5 * (hi + lo)
    vals = (g * nodes) ** (1 / g) * datum(sign * np.asarray(x_of_xi(nodes, cfg)))
    return 0.5 * vals @ GAUSS_WEIGHTS


def init_from_datum(datum: InitialDatum, grid: HalfLineGrid,
                    cfg: GammaConfig) -> tuple[HalfLineState, HalfLineState]:
    """Build the (left, right) half-line states from an initial datum.

    The left problem is reflected xi -> -xi so both states evolve under the
    canonical equation.  Raises :class:`SupportOverflow` if the grid is too
    short.
    """
    if cfg.dim != 1:
        raise ValueError("half-line solver requires dim = 1")
    if xi_extent_of_datum(datum, cfg) > grid.extent:
        raise SupportOverflow(
            f"xi-image of support reaches {xi_extent_of_datum(datum, cfg)}, "
            f"grid extent is only {grid.extent}"
        )
    right = HalfLineState(grid=grid, cells=_cell_averages(datum, grid, cfg, +1.0),
                          orientation="right")
    left = HalfLineState(grid=grid, cells=_cell_averages(datum, grid, cfg, -1.0),
                         orientation="left")
    return left, right


def godunov_flux(u_upwind, cfg: GammaConfig):
    """Interface flux u^(1+gamma)/(1+gamma), fed by the right-side cell.

    In canonical orientation all speeds are <= 0, so exact Godunov upwinding
    reduces to evaluating the flux at the downwind (right) value.
    """
    u = np.asarray(u_upwind, dtype=float)
    if np.any(u < 0):
        raise ValueError("flux requires u >= 0")
    return u ** (1 + cfg.gamma) / (1 + cfg.gamma)


def riemann_exact(u_l: float, u_r: float, xi_over_t: float, cfg: GammaConfig) -> float:
    """Self-similar entropy solution of the canonical Riemann problem.

    The flux -u^(1+gamma)/(1+gamma) is concave on u >= 0, so a jump is an
    admissible shock iff u_l <= u_r (speed from the Rankine-Hugoniot
    condition); otherwise the jump opens into the rarefaction fan
    u = (-xi/t)^(1/gamma) between speeds -u_l^gamma and -u_r^gamma.
    """
    if u_l < 0 or u_r < 0:
        raise ValueError("Riemann data must be nonnegative")
    g = cfg.gamma
    if u_l == u_r:
        return u_l
    if u_l < u_r:  # admissible shock
        s = -(u_r ** (1 + g) - u_l ** (1 + g)) / ((1 + g) * (u_r - u_l))
        return u_l if xi_over_t < s else u_r
    # rarefaction between speeds -u_l^gamma < -u_r^gamma
    if xi_over_t <= -(u_l**g):
        return u_l
    if xi_over_t >= -(u_r**g):
        return u_r
    return (-xi_over_t) ** (1 / g)


def stable_dt(state: HalfLineState, cfl: float, cfg: GammaConfig) -> float:
    """CFL time step cfl * dxi / max(speed), floored at EPS_SPEED."""
    speed = float(np.max(state.cells, initial=0.0)) ** cfg.gamma
    return cfl * state.grid.cell_width / max(speed, EPS_SPEED)


def step(state: HalfLineState, cfl: float, cfg: GammaConfig,
         dt_cap: Optional[float] = None) -> HalfLineState:
    """One conservative explicit update, in place; returns the state.

    dt = cfl * dxi / max(max_i u_i^gamma, EPS_SPEED), optionally capped by
    ``dt_cap`` (used to land exactly on a target time).  The flux through
    xi = 0 is added to the outflux ledger so that
    dxi * sum(cells) + ledger is constant to rounding.
    """
    if not 0 < cfl <= 1:
        raise CflViolation(f"cfl must be in (0, 1], got {cfl}")
    u = state.cells
    if u.min(initial=0.0) < -CLIP_TOL:
        raise FloatingPointError("negative cell average beyond roundoff tolerance")
    np.maximum(u, 0.0, out=u)
    dt = stable_dt(state, cfl, cfg)
    if dt_cap is not None:
        dt = min(dt, dt_cap)
    g = cfg.gamma
    flux = u ** (1 + g) / (1 + g)
    boundary_flux = flux[0]
    # u_i += (dt/dxi) * (G(u_{i+1}) - G(u_i)); far ghost value is 0 (inflow 0)
    increment = np.append(flux[1:], 0.0) - flux
    u += (dt / state.grid.cell_width) * increment
    if u.min(initial=0.0) < -CLIP_TOL:
        raise FloatingPointError("monotone update produced a negative cell")
    np.maximum(u, 0.0, out=u)
    state.outflux_ledger += dt * boundary_flux
    state.time += dt
    state.trace_times.append(state.time)
    state.trace_values.append(float(u[0]))
    return state


def run_until(state: HalfLineState, t_end: float, cfl: float, cfg: GammaConfig,
              observer: Optional[Callable[["HalfLineState"], None]] = None,
              cadence: Optional[float] = None) -> HalfLineState:
    """Step until t_end, landing on it exactly.

    If an observer is given, it is called with immutable snapshots at times
    t0 + k*cadence (k = 0, 1, ...), linearly interpolated in time between
    the two bracketing steps; the stepping sequence itself is independent
    of the cadence.
    """
    if t_end < state.time:
        raise ValueError("t_end precedes the current state time")
    if observer is not None and (cadence is None or cadence <= 0):
        raise ValueError("observer requires a positive cadence")
    tiny = 1e-12 * max(1.0, abs(t_end))
    next_snap = state.time
    last_snap = None
    if observer is not None:
        observer(state.copy())
        last_snap = state.time
        next_snap += cadence
    prev_cells = None
    prev_time = state.time
    prev_ledger = state.outflux_ledger
    while t_end - state.time > tiny:
        if observer is not None:
            prev_cells = state.cells.copy()
            prev_time = state.time
            prev_ledger = state.outflux_ledger
        step(state, cfl, cfg, dt_cap=t_end - state.time)
        if observer is not None:
            while next_snap <= state.time + tiny and next_snap <= t_end + tiny:
                w = 0.0 if state.time == prev_time else (
                    (next_snap - prev_time) / (state.time - prev_time))
                snap = state.copy()
                snap.cells = (1 - w) * prev_cells + w * state.cells
                snap.outflux_ledger = (1 - w) * prev_ledger + w * state.outflux_ledger
                snap.time = next_snap
                observer(snap)
                last_snap = next_snap
                next_snap += cadence
    state.time = t_end
    if observer is not None and (last_snap is None or last_snap < t_end - tiny):
        observer(state.copy())
    return state


def total_variation(state: HalfLineState) -> float:
    """Discrete total variation including the jumps to vacuum at both ends."""
    u = state.cells
    return float(u[0] + np.abs(np.diff(u)).sum() + u[-1])
