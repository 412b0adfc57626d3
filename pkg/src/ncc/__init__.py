"""Narrative-credibility commitment model and its empirical toolkit.

The package has two halves. The model half describes a dynamic game between
a central government choosing narrative precision and monitoring intensity,
local governments choosing how faithfully to execute, and market participants
whose beliefs, investment and composition evolve in response; it ships period
mechanics (:mod:`ncc.model`), a value-iteration equilibrium solver
(:mod:`ncc.solver`) and a trajectory simulator (:mod:`ncc.simulate`). The
empirical half identifies high-frequency narrative shocks from minute bars
(:mod:`ncc.shocks`) and traces their macro effects with per-horizon
projections under HAC inference (:mod:`ncc.localproj`); :mod:`ncc.pipeline`
wires everything into a reproducible, config-driven run.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    InsufficientDataError,
    InvariantError,
    NccError,
    NumericalError,
    SingularDesignError,
)
from .params import MODEL_PARAM_KEYS, ModelParams
from .model import (
    EconState,
    InvestmentBreakdown,
    PolicyAction,
    aggregate_investment,
    central_period_utility,
    investment_variance,
    local_best_response,
    local_utility,
    mean_best_response,
    update_belief,
    update_institutionalization,
    update_skeptic_share,
)
from .solver import (
    FocDiagnostics,
    GridSpec,
    SolvedPolicy,
    bellman_backup,
    foc_residuals,
    solve_value_iteration,
    steady_state_credibility,
)
from .simulate import (
    EnsembleStats,
    Trajectory,
    detect_commitment_transition,
    path_seed,
    simulate_ensemble,
    simulate_path,
)
from .shocks import (
    MinuteBarSeries,
    ShockSeries,
    build_quarterly_shock_series,
    equal_weight_shock,
    opening_gap_shock,
)
from .localproj import (
    IrfResult,
    LpDesign,
    MacroPanel,
    build_lp_dataset,
    estimate_irf,
    newey_west_cov,
    ols,
    significance_table,
)
from .plotting import extract_irf_data, render_irf_plot
from .config import RunConfig, apply_overrides, load_config, serialize_config
from .pipeline import RunManifest, run_pipeline

__all__ = [name for name in dir() if not name.startswith("_")]
