"""Assembly of the global measure solution m(t)*delta_0 + rho(x,t).

The two half-line states are stitched together around the origin: cell
masses map exactly through the coordinate change (the integral of u over a
xi-cell equals the integral of rho over the cell's x-image), the
accumulated boundary outflux becomes the concentrated mass m(t), and the
cumulative distribution F carries a jump of height m at x = 0.  The
pseudo-inverse X(z) of F encodes the concentrated mass as a plateau at
zero, which is how every structural diagnostic below reads the solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .conslaw import HalfLineState
from .datum import InitialDatum, integrate_piecewise
from .frames import GammaConfig, dxi_dx, time_driftfree_to_original, x_of_xi

MASS_REL_TOL = 1e-10
SLOPE_JUMP_RATIO = 3.0
EDGE_SLOPE_FACTOR = 5.0
EDGE_EXCLUDE_CELLS = 2


class TimeMismatch(ValueError):
    """The two half-line states are at different times."""


@dataclass
class MeasureState:
    """Concentrated mass + sampled density at one instant.

    ``F_x``/``F_val`` are the breakpoints of the cumulative distribution,
    trimmed to the support; the Dirac mass appears as a vertical segment
    (two breakpoints with x = 0).  Density samples sit at the x-images of
    the xi-cell centers with their exact per-cell masses.
    """

    time: float
    dirac_mass: float
    total_mass: float
    x: np.ndarray
    rho: np.ndarray
    mass_weights: np.ndarray
    F_x: np.ndarray
    F_val: np.ndarray
    support: tuple
    sup_u_initial: float = 0.0

    @property
    def ac_mass(self) -> float:
        """Mass of the absolutely continuous part."""
        return float(self.mass_weights.sum())

    @property
    def left_ac_mass(self) -> float:
        """Absolutely continuous mass strictly left of the origin."""
        return float(self.mass_weights[self.x < 0].sum())


@dataclass
class PseudoInverse:
    """Monotone rearrangement X(z) on [0, M], sampled on a uniform z-grid.

    The concentrated mass shows up as the plateau X = 0 on
    z in [plateau[0], plateau[1]].
    """

    z_grid: np.ndarray
    x_values: np.ndarray
    plateau: tuple

    @property
    def plateau_width(self) -> float:
        return self.plateau[1] - self.plateau[0]


@dataclass(frozen=True)
class Violation:
    kind: str
    time: float
    detail: str


@dataclass
class DiagnosticReport:
    violations: list = field(default_factory=list)
    metrics: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def counts(self) -> dict:
        out: dict = {}
        for v in self.violations:
            out[v.kind] = out.get(v.kind, 0) + 1
        return out


def _side_breakpoints(state: HalfLineState, cfg: GammaConfig, sign: float):
    """Ascending (x_edges, cell_masses, x_centers, u_cells) for one side.

    Trailing vacuum beyond the outermost nonzero cell is trimmed so that the
    final breakpoint is the support edge.
    """
    u = state.cells
    nz = np.nonzero(u > 0)[0]
    if nz.size == 0:
        return (np.empty(0), np.empty(0), np.empty(0), np.empty(0))
    last = int(nz[-1])
    edges = state.grid.edges[: last + 2]
    centers = state.grid.centers[: last + 1]
    masses = u[: last + 1] * state.grid.cell_width
    x_edges = sign * np.asarray(x_of_xi(edges, cfg))
    x_centers = sign * np.asarray(x_of_xi(centers, cfg))
    if sign < 0:  # reflected side: ascending order is reversed canonical order
        return (x_edges[::-1], masses[::-1], x_centers[::-1], u[: last + 1][::-1])
    return (x_edges, masses, x_centers, u[: last + 1])


def assemble(left: HalfLineState, right: HalfLineState, cfg: GammaConfig) -> MeasureState:
    """Stitch the two half-line states into one measure snapshot."""
    if not math.isclose(left.time, right.time, rel_tol=1e-9, abs_tol=1e-12):
        raise TimeMismatch(f"left at t={left.time}, right at t={right.time}")
    dirac = left.outflux_ledger + right.outflux_ledger
    total = dirac + left.mass + right.mass

    lx_edges, lmass, lx_centers, lu = _side_breakpoints(left, cfg, -1.0)
    rx_edges, rmass, rx_centers, ru = _side_breakpoints(right, cfg, +1.0)

    xs = [lx_edges if lx_edges.size else np.array([0.0])]
    vs = [np.concatenate([[0.0], np.cumsum(lmass)]) if lmass.size else np.array([0.0])]
    left_total = float(lmass.sum())
    # vertical segment at the origin encodes the concentrated mass
    xs.append(np.array([0.0]))
    vs.append(np.array([left_total + dirac]))
    if rmass.size:
        xs.append(rx_edges)
        vs.append(left_total + dirac + np.concatenate([[0.0], np.cumsum(rmass)]))
    F_x = np.concatenate(xs)
    F_val = np.concatenate(vs)

    x = np.concatenate([lx_centers, rx_centers])
    u_vals = np.concatenate([lu, ru])
    weights = np.concatenate([lmass, rmass])
    rho = dxi_dx(x, cfg) * u_vals if x.size else np.empty(0)
    return MeasureState(
        time=left.time,
        dirac_mass=dirac,
        total_mass=total,
        x=x,
        rho=rho,
        mass_weights=weights,
        F_x=F_x,
        F_val=F_val,
        support=(float(F_x[0]), float(F_x[-1])),
        sup_u_initial=max(left.sup_initial, right.sup_initial),
    )


def pseudo_inverse(ms: MeasureState, z_count: int) -> PseudoInverse:
    """Monotone inversion of the cumulative distribution on a uniform z-grid.

    Flat stretches of F (vacuum) resolve to the infimum convention; the
    plateau at the origin has width equal to the concentrated mass.
    """
    if z_count < 16:
        raise ValueError("z_count must be at least 16")
    z = np.linspace(0.0, ms.total_mass, z_count)
    F_x, F_val = ms.F_x, ms.F_val
    k = np.searchsorted(F_val, z, side="right")
    k = np.clip(k, 1, F_val.size - 1)
    denom = F_val[k] - F_val[k - 1]
    with np.errstate(invalid="ignore", divide="ignore"):
        w = np.where(denom > 0, (z - F_val[k - 1]) / denom, 0.0)
    w = np.clip(w, 0.0, 1.0)
    X = F_x[k - 1] + w * (F_x[k] - F_x[k - 1])
    left_ac = float(F_val[np.nonzero(F_x < 0)[0][-1] + 1]) if np.any(F_x < 0) else 0.0
    plateau = (left_ac, left_ac + ms.dirac_mass)
    return PseudoInverse(z_grid=z, x_values=X, plateau=plateau)


def wasserstein_to_dirac(ms: MeasureState, p: float = 1.0) -> float:
    """p-Wasserstein distance to the fully condensed state M*delta_0.

    Transport to a point gives W_p^p = integral of |x|^p against the
    measure, i.e. the z-integral of |X|^p through the rearrangement.
    """
    if p != math.inf and p < 1:
        raise ValueError("p must be >= 1 or inf")
    if p == math.inf:
        return max(abs(ms.support[0]), abs(ms.support[1]))
    if ms.mass_weights.size == 0:
        return 0.0
    moment = float(np.sum(ms.mass_weights * np.abs(ms.x) ** p))
    return moment ** (1.0 / p)


@dataclass(frozen=True)
class OriginalFrameSnapshot:
    """Summary of one measure snapshot mapped back to the confined frame."""

    tau: float
    t_driftfree: float
    dirac_mass: float
    total_mass: float
    support_lo: float
    support_hi: float
    diameter: float
    w1: float


def original_frame_series(ms_series, cfg: GammaConfig):
    """Map snapshots to the original frame; supports and W_p contract by e^-tau."""
    if cfg.dim != 1:
        raise ValueError("original-frame series requires dim = 1")
    out = []
    for ms in ms_series:
        tau = float(time_driftfree_to_original(ms.time, cfg))
        shrink = math.exp(-tau)
        lo, hi = ms.support
        out.append(OriginalFrameSnapshot(
            tau=tau,
            t_driftfree=ms.time,
            dirac_mass=ms.dirac_mass,
            total_mass=ms.total_mass,
            support_lo=lo * shrink,
            support_hi=hi * shrink,
            diameter=(hi - lo) * shrink,
            w1=wasserstein_to_dirac(ms, 1.0) * shrink,
        ))
    return out


def _interior_mask(ps: PseudoInverse, x_tol: float) -> np.ndarray:
    """Nodes away from the plateau (one-cell buffer) and the support edges."""
    z = ps.z_grid
    dz = z[1] - z[0]
    mask = np.ones(z.size, dtype=bool)
    mask[: EDGE_EXCLUDE_CELLS] = False
    mask[-EDGE_EXCLUDE_CELLS:] = False
    z_lo, z_hi = ps.plateau
    mask &= ~((z >= z_lo - dz) & (z <= z_hi + dz))
    mask &= np.abs(ps.x_values) > x_tol
    return mask


def _oleinik_flags(ps: PseudoInverse, x_tol: float):
    """Indices of slope jumps violating the one-sided admissibility pattern.

    Admissible derivative jumps of X are increasing where X < 0 and
    decreasing where X > 0; candidates are adjacent-slope ratios beyond
    SLOPE_JUMP_RATIO, evaluated away from the plateau and the edges.
    """
    z, X = ps.z_grid, ps.x_values
    dz = z[1] - z[0]
    s = np.diff(X) / dz
    flags = []
    interior = _interior_mask(ps, x_tol)
    floor = 1e-12 * max(np.max(np.abs(X)), 1.0)
    for j in range(1, s.size):
        if not (interior[j] and interior[j - 1]):
            continue
        if s[j - 1] <= floor or s[j] <= floor:
            continue
        ratio = s[j] / s[j - 1]
        x_here = X[j]
        if ratio > SLOPE_JUMP_RATIO and x_here > x_tol:
            flags.append((j, ratio))
        elif ratio < 1.0 / SLOPE_JUMP_RATIO and x_here < -x_tol:
            flags.append((j, ratio))
    return flags


def check_entropy_measure(ms_series, ps_series, cfg: GammaConfig,
                          datum: Optional[InitialDatum] = None,
                          eq_tol: Optional[float] = None) -> DiagnosticReport:
    """Structural diagnostics of a solution series; collects, never raises.

    Checked per snapshot: initial-datum match (cumulative distributions at
    the breakpoints, when a datum is supplied), monotonicity and continuity
    of X, positive interior slopes, steep edge slopes where the support
    does not touch the origin, the one-sided slope-jump admissibility
    pattern (kept only if stable under z-refinement), mass bookkeeping, and
    the sup-decay bound on rho * |x|^(1/(1+gamma)).  Across snapshots: the
    concentrated mass must not decrease and the pseudo-inverse equation
    residual X_t |X_z|^gamma + X is accumulated in a discrete L1 norm (a
    violation only when ``eq_tol`` is given).
    """
    if len(ms_series) == 0 or len(ms_series) != len(ps_series):
        raise ValueError("need matching non-empty snapshot series")
    times = [ms.time for ms in ms_series]
    if any(t2 <= t1 for t1, t2 in zip(times[:-1], times[1:])):
        raise ValueError("snapshot times must be strictly increasing")
    report = DiagnosticReport()
    g = cfg.gamma

    M = max(ms_series[0].total_mass, 1e-300)
    diam0 = max(ms_series[0].support[1] - ms_series[0].support[0], 1e-300)
    x_tol = 1e-9 * diam0

    if datum is not None:
        ms0 = ms_series[0]
        F_ref = np.array([integrate_piecewise(datum, datum.a, float(xx))
                          for xx in ms0.F_x])
        sup_err = float(np.max(np.abs(F_ref - ms0.F_val)))
        report.metrics["initial_cumulative_sup_error"] = sup_err
        if sup_err > 1e-8 * max(M, 1.0) or ms0.dirac_mass != 0.0:
            report.violations.append(Violation(
                "initial-datum", ms0.time,
                f"cumulative mismatch {sup_err:.3e} or nonzero initial Dirac mass"))

    decay_bound = (1 + g) ** (-1 / (1 + g))
    prev_m = -math.inf
    max_gap_rel = 0.0
    worst_mass_err = 0.0
    for ms, ps in zip(ms_series, ps_series):
        t = ms.time
        # both the per-snapshot closure and conservation across snapshots
        mass_err = max(abs(ms.dirac_mass + ms.ac_mass - ms.total_mass),
                       abs(ms.total_mass - ms_series[0].total_mass))
        worst_mass_err = max(worst_mass_err, mass_err)
        if mass_err > MASS_REL_TOL * max(ms.total_mass, 1.0):
            report.violations.append(Violation(
                "mass-conservation", t, f"m + ac - M = {mass_err:.3e}"))
        if ms.dirac_mass < prev_m - 1e-12 * max(ms.total_mass, 1.0):
            report.violations.append(Violation(
                "mass-monotonicity", t,
                f"concentrated mass decreased from {prev_m} to {ms.dirac_mass}"))
        prev_m = max(prev_m, ms.dirac_mass)

        if ms.sup_u_initial > 0 and ms.x.size:
            lhs = ms.rho * np.abs(ms.x) ** (1 / (1 + g))
            bound = decay_bound * ms.sup_u_initial
            if float(lhs.max()) > bound * (1 + 1e-9):
                report.violations.append(Violation(
                    "decay-bound", t,
                    f"rho*|x|^(1/(1+gamma)) reached {lhs.max():.3e} > {bound:.3e}"))

        X, z = ps.x_values, ps.z_grid
        dz = z[1] - z[0]
        diam = max(ms.support[1] - ms.support[0], 1e-300)
        defect = float(max(0.0, -np.min(np.diff(X)))) if X.size > 1 else 0.0
        if defect > 1e-12 * diam:
            report.violations.append(Violation(
                "monotonicity", t, f"X decreases by {defect:.3e}"))

        interior = _interior_mask(ps, x_tol)
        pair = interior[:-1] & interior[1:]
        if np.any(pair):
            gaps = np.diff(X)[pair]
            gap_tol = 10.0 * diam * (dz / ms.total_mass) ** (g / (1 + g))
            max_gap_rel = max(max_gap_rel, float(gaps.max()) / diam)
            if float(gaps.max()) > gap_tol:
                report.violations.append(Violation(
                    "continuity", t,
                    f"interior gap {gaps.max():.3e} exceeds {gap_tol:.3e}"))
            if float(gaps.min()) <= 0.0:
                j = int(np.nonzero(pair)[0][np.argmin(gaps)])
                if abs(X[j]) > x_tol:
                    report.violations.append(Violation(
                        "interior-slope", t,
                        f"zero slope off the plateau at z={z[j]:.6f}, X={X[j]:.3e}"))

        # edge steepness and jump admissibility are required for t > 0 only:
        # a BV initial datum may carry edge jumps that the evolution
        # instantly opens into fans
        slopes = np.diff(X) / dz
        pos = slopes[pair & (slopes > 0)] if np.any(pair) else np.array([])
        median_slope = float(np.median(pos)) if pos.size else 0.0
        if median_slope > 0 and t > 0:
            if X[0] < -x_tol and slopes[0] < EDGE_SLOPE_FACTOR * median_slope:
                report.violations.append(Violation(
                    "edge-slope", t,
                    f"left edge slope {slopes[0]:.3e} not steep vs median {median_slope:.3e}"))
            if X[-1] > x_tol and slopes[-1] < EDGE_SLOPE_FACTOR * median_slope:
                report.violations.append(Violation(
                    "edge-slope", t,
                    f"right edge slope {slopes[-1]:.3e} not steep vs median {median_slope:.3e}"))

        flags = _oleinik_flags(ps, x_tol) if t > 0 else []
        if flags:
            coarse = pseudo_inverse(ms, max(16, z.size // 2))
            coarse_flags = _oleinik_flags(coarse, x_tol)
            coarse_z = [coarse.z_grid[j] for j, _ in coarse_flags]
            dz_c = coarse.z_grid[1] - coarse.z_grid[0]
            for j, ratio in flags:
                if any(abs(z[j] - zc) <= 2 * dz_c for zc in coarse_z):
                    report.violations.append(Violation(
                        "oleinik", t,
                        f"inadmissible slope jump (ratio {ratio:.2f}) at "
                        f"z={z[j]:.6f}, X={X[j]:.3e}"))

    # pseudo-inverse equation residual between consecutive snapshots
    residuals = []
    for (ms1, ps1), (ms2, ps2) in zip(zip(ms_series[:-1], ps_series[:-1]),
                                      zip(ms_series[1:], ps_series[1:])):
        if ps1.z_grid.size != ps2.z_grid.size:
            continue
        z = ps1.z_grid
        dz = z[1] - z[0]
        dt = ms2.time - ms1.time
        X1, X2 = ps1.x_values, ps2.x_values
        Xt = (X2 - X1) / dt
        Xz = np.gradient(X1, dz)
        resid = Xt * np.abs(Xz) ** g + X1
        mask = _interior_mask(ps1, x_tol) & _interior_mask(
            PseudoInverse(z, X1, ps2.plateau), x_tol)
        l1 = float(np.sum(np.abs(resid[mask])) * dz)
        residuals.append((ms1.time, l1))
        if eq_tol is not None and l1 > eq_tol:
            report.violations.append(Violation(
                "equation-residual", ms1.time, f"L1 residual {l1:.3e} > {eq_tol:.3e}"))

    report.metrics["eq_residual_l1"] = residuals
    report.metrics["max_interior_gap_rel"] = max_gap_rel
    report.metrics["max_mass_error"] = worst_mass_err
    report.metrics["final_dirac_fraction"] = ms_series[-1].dirac_mass / M
    return report


def trace_onset_time(state: HalfLineState, threshold: float = 1e-2) -> float:
    """First recorded time the boundary trace exceeds the threshold (inf if never)."""
    values = np.asarray(state.trace_values)
    above = np.nonzero(values > threshold)[0]
    if above.size == 0:
        return math.inf
    return float(state.trace_times[int(above[0])])
