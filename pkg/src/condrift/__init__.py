"""condrift: condensation dynamics of a nonlinear drift equation in 1-D.

Finite-volume entropy solvers for the drift-free equation
rho_t - (x rho^(1+gamma))_x = 0, global-in-time measure solutions with a
growing concentrated mass at the origin, pseudo-inverse diagnostics, and
closed-form reference solutions.
"""

from .frames import (
    FramePoint,
    GammaConfig,
    density_driftfree_to_original,
    density_original_to_driftfree,
    time_driftfree_to_original,
    time_original_to_driftfree,
    u_to_rho,
    rho_to_u,
    x_of_xi,
    xi_of_x,
)
from .datum import (
    DisconnectedSupport,
    InitialDatum,
    block_datum,
    example_block_datum,
    piecewise_constant,
    piecewise_linear,
    unit_uniform_datum,
)
from .characteristics import (
    BlowUpReached,
    CharacteristicState,
    NotSmoothRegime,
    ZeroDatum,
    advance,
    blow_up_time,
    evaluate_smooth,
    evaluate_smooth_grid,
    first_shock_time,
)
from .conslaw import (
    CflViolation,
    HalfLineGrid,
    HalfLineState,
    SupportOverflow,
    godunov_flux,
    init_from_datum,
    make_grid,
    riemann_exact,
    run_until,
    step,
)
from .measure import (
    DiagnosticReport,
    MeasureState,
    PseudoInverse,
    TimeMismatch,
    assemble,
    check_entropy_measure,
    original_frame_series,
    pseudo_inverse,
    trace_onset_time,
    wasserstein_to_dirac,
)
from .oracle import (
    ExplicitSolutionSpec,
    X_explicit,
    mass_explicit,
    rho_explicit,
    u_explicit,
)

__version__ = "0.1.0"
