"""kslab: a numerical laboratory for parabolic-elliptic chemotaxis.

Simulates u_t = lap(u) - chi div(u grad v), 0 = lap(v) - v + u/(1 + eps u)
on 2D/3D boxes with Neumann boundaries and measure-valued initial data, and
verifies the quantitative estimates the regularized system satisfies: exact
mass conservation, elliptic L^r contraction, superlinear ODE decay bounds,
L^p smoothing rates, vague continuity at t = 0, and the attractive-case
mass dichotomy.
"""

__version__ = "0.1.0"

from .grid import (
    Grid,
    GridField,
    build_grid,
    constant_field,
    gradient_energy,
    integrate,
    lp_norm,
    read_snapshot,
    sample_field,
    write_snapshot,
)
from .measures import (
    RadonMeasure,
    TestDictionary,
    UnderResolvedMollifierError,
    load_density,
    mollify,
    vague_distance,
)
from .elliptic import (
    EllipticConvergenceError,
    EllipticSolveReport,
    contraction_check,
    gradient,
    solve_helmholtz_neumann,
)
from .stepper import (
    BlowupReport,
    BlowupThresholds,
    SimState,
    detect_blowup,
    initial_state,
    regularized_source,
    stable_dt,
    step,
)
from .ode_bounds import (
    OdeBoundParams,
    bound_constant,
    bound_value,
    integrate_ode,
    power_decay_solution,
)
from .diagnostics import (
    InequalityReport,
    TimeSeriesRecord,
    central_inequality_check,
    grad_flux_time_integrals,
    record,
    smoothing_rate_fit,
    vague_continuity_check,
)
from .config import ConfigError, SimConfig
from .runner import RunManifest, eps_ladder, mass_sweep, run

__all__ = [name for name in dir() if not name.startswith("_")]
