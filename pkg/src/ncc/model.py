"""Period-level mechanics of the narrative-credibility game.

One period plays out as follows. The central government announces narrative
precision ``p`` and monitoring intensity ``m``. Each local government draws an
execution cost ``kappa`` and picks its ideal execution consistency; realized
execution adds noise. Market participants (a fixed believer share, a rational
share that invests on current credibility, and a skeptic share anchored at a
historical belief) generate aggregate investment. Afterwards credibility,
the skeptic share and the institutionalization stock are updated. Once the
stock passes its threshold, the commitment floor ``c_min`` binds on execution.

All functions here are pure: random draws enter as arguments, never generated
internally, so everything is safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, InvariantError
from .params import ModelParams

__all__ = [
    "EconState",
    "PolicyAction",
    "InvestmentBreakdown",
    "local_best_response",
    "mean_best_response",
    "aggregate_investment",
    "update_belief",
    "update_skeptic_share",
    "update_institutionalization",
    "local_utility",
    "investment_variance",
    "central_period_utility",
]


@dataclass(frozen=True)
class PolicyAction:
    """Central-government controls: narrative precision and monitoring intensity."""

    p: float
    m: float

    def __post_init__(self):
        for name in ("p", "m"):
            v = getattr(self, name)
            if not math.isfinite(v) or not 0.0 <= v <= 1.0:
                raise DomainError(f"action component {name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, float(v))


@dataclass(frozen=True)
class EconState:
    """Aggregate state: credibility theta, institutionalization stock l, skeptic share omega.

    ``l_tilde`` is the compactified stock l/(1+l); it is always recomputed
    from ``l`` so the two can never drift apart.
    """

    theta: float
    l: float
    omega: float

    def __post_init__(self):
        if not (math.isfinite(self.theta) and 0.0 <= self.theta <= 1.0):
            raise DomainError(f"theta must lie in [0, 1], got {self.theta!r}")
        if not (math.isfinite(self.l) and self.l >= 0.0):
            raise DomainError(f"l must be finite and >= 0, got {self.l!r}")
        if not (math.isfinite(self.omega) and 0.0 <= self.omega <= 1.0):
            raise DomainError(f"omega must lie in [0, 1], got {self.omega!r}")
        for name in ("theta", "l", "omega"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def l_tilde(self) -> float:
        return self.l / (1.0 + self.l)

    def validate_against(self, params: ModelParams) -> None:
        """Check the share constraint alpha + omega <= 1."""
        if params.alpha + self.omega > 1.0 + 1e-12:
            raise InvariantError(
                f"believer share {params.alpha} + skeptic share {self.omega} exceeds 1"
            )

    def commitment_active(self, params: ModelParams) -> bool:
        return self.l >= params.l_threshold


@dataclass(frozen=True)
class InvestmentBreakdown:
    """Per-group investment levels; the total is their exact sum."""

    i_b: float
    i_r: float
    i_s: float

    @property
    def i_total(self) -> float:
        return self.i_b + self.i_r + self.i_s


# --- local government ------------------------------------------------------


def _penalty_weight(action: PolicyAction, params: ModelParams) -> float:
    return params.beta0 + action.m


def _best_response_raw(b, p, kappa):
    """Unfloored ideal consistency b*p / (kappa + b); broadcasts over arrays."""
    return b * p / (kappa + b)


def local_best_response(
    params: ModelParams,
    action: PolicyAction,
    kappa: float,
    commitment_active: bool = False,
) -> float:
    """Ideal execution consistency of a local government with cost ``kappa``.

    Balancing the quadratic execution cost against the deviation penalty
    ``beta0 + m`` yields ``(beta0 + m) * p / (kappa + beta0 + m)``. When the
    commitment floor is active the result is raised to at least ``c_min``.
    """
    if not (isinstance(kappa, (int, float)) and math.isfinite(kappa)) or kappa <= 0.0:
        raise DomainError(f"kappa must be a finite positive real, got {kappa!r}")
    c = _best_response_raw(_penalty_weight(action, params), action.p, float(kappa))
    if commitment_active:
        c = max(c, params.c_min)
    return float(c)


def mean_best_response(
    params: ModelParams, action: PolicyAction, commitment_active: bool = False
) -> float:
    """Ideal consistency averaged over the uniform execution-cost draw.

    The unfloored average has the closed form
    ``b*p * log((kappa_hi + b) / (kappa_lo + b)) / (kappa_hi - kappa_lo)``
    with ``b = beta0 + m``. Under an active commitment floor the integrand is
    ``max(formula, c_min)``, handled piecewise around the cost level at which
    the formula crosses the floor.
    """
    b = _penalty_weight(action, params)
    lo, hi = params.kappa_lo, params.kappa_hi
    width = hi - lo
    floor = params.c_min if commitment_active else 0.0

    if b * action.p <= 0.0:
        return floor

    def _segment(a, z):
        # integral of b*p/(kappa+b) over kappa in [a, z]
        return b * action.p * math.log((z + b) / (a + b))

    if floor <= 0.0:
        return _segment(lo, hi) / width
    # formula >= floor iff kappa <= kappa_cross = b*p/floor - b
    kappa_cross = b * (action.p - floor) / floor
    if kappa_cross >= hi:
        return _segment(lo, hi) / width
    if kappa_cross <= lo:
        return floor
    return (_segment(lo, kappa_cross) + (hi - kappa_cross) * floor) / width


def local_utility(
    c: float,
    theta: float,
    kappa: float,
    action: PolicyAction,
    params: ModelParams,
) -> float:
    """Local-government period payoff at realized consistency ``c``.

    Credibility benefit ``xi * theta`` less the execution cost
    ``kappa * c^2 / 2`` and the deviation penalty
    ``(beta0 + m) * (c - p)^2``.
    """
    if not math.isfinite(kappa) or kappa < 0.0:
        raise DomainError(f"kappa must be finite and >= 0, got {kappa!r}")
    b = _penalty_weight(action, params)
    return params.xi * theta - 0.5 * kappa * c * c - b * (c - action.p) ** 2


# --- market participants ---------------------------------------------------


def _investment_components(theta, omega, p, params: ModelParams):
    """Raw per-group investments; broadcasts, performs no share validation."""
    i_b = params.alpha * params.k_b * p
    i_r = (1.0 - params.alpha - omega) * params.k_r * theta
    i_s = omega * params.k_s * params.theta_bar
    return i_b, i_r, i_s


def aggregate_investment(
    state: EconState, action: PolicyAction, params: ModelParams
) -> InvestmentBreakdown:
    """Aggregate market investment split by participant group.

    Believers invest on announced precision, rational participants on current
    credibility, skeptics on their anchored belief.
    """
    state.validate_against(params)
    i_b, i_r, i_s = _investment_components(state.theta, state.omega, action.p, params)
    return InvestmentBreakdown(i_b=float(i_b), i_r=float(i_r), i_s=float(i_s))


# --- transitions -----------------------------------------------------------


def update_belief(
    theta: float,
    c: float,
    action: PolicyAction,
    params: ModelParams,
    eps: float,
) -> float:
    """Next-period credibility: move toward the observed signal c*p, plus noise.

    ``theta + eta * (c*p - theta) + eps``, clamped to [0, 1].
    """
    if not (math.isfinite(theta) and 0.0 <= theta <= 1.0):
        raise DomainError(f"theta must lie in [0, 1], got {theta!r}")
    raw = theta + params.eta * (c * action.p - theta) + eps
    return float(min(max(raw, 0.0), 1.0))


def update_skeptic_share(omega: float, c: float, params: ModelParams) -> float:
    """Skeptic share decays linearly with realized execution, floored at zero."""
    return float(max(omega - params.n_s * c, 0.0))


def update_institutionalization(l: float, theta: float, params: ModelParams) -> float:
    """Institutionalization accrues phi*theta whenever credibility clears its threshold."""
    if theta >= params.theta_threshold:
        return float(l + params.phi * theta)
    return float(l)


# --- central government ----------------------------------------------------


def _one_step_variance(omega_next, p, params: ModelParams):
    """Conditional variance of next-period investment; broadcasts.

    The only stochastic channel into investment is next-period credibility,
    which absorbs execution noise scaled by ``eta * p`` plus belief noise, and
    feeds the rational group's position ``(1 - alpha - omega_next) * k_r``.
    Clamping is ignored (linearization).
    """
    exposure = (1.0 - params.alpha - omega_next) * params.k_r
    theta_var = (params.eta * p * params.sigma_nu) ** 2 + params.sigma_eps**2
    return exposure * exposure * theta_var


def investment_variance(
    state: EconState,
    action: PolicyAction,
    params: ModelParams,
    c_star: float | None = None,
) -> float:
    """One-step-ahead conditional variance of aggregate investment.

    ``c_star`` is the ideal consistency determining the next-period skeptic
    share; when omitted it defaults to the cost-averaged ideal consistency
    under the state's commitment regime.
    """
    if c_star is None:
        c_star = mean_best_response(params, action, state.commitment_active(params))
    omega_next = max(state.omega - params.n_s * c_star, 0.0)
    return float(_one_step_variance(omega_next, action.p, params))


def _central_cost(p, m, params: ModelParams):
    return 0.5 * params.cost_p * p * p + 0.5 * params.cost_m * m * m


def central_period_utility(
    state: EconState,
    action: PolicyAction,
    params: ModelParams,
    kappa: float | None = None,
) -> float:
    """Central-government period payoff at the given state and controls.

    Expected investment enters with weight ``lambda``, the one-step investment
    variance with weight ``-gamma``, quadratic signaling/monitoring costs with
    coefficients ``cost_p`` / ``cost_m``, and the carried institutionalization
    stock with weight ``-psi``.

    ``kappa=None`` evaluates the local response in expectation over the
    uniform cost draw (the government knows only the cost distribution);
    passing a value conditions on that draw instead.
    """
    state.validate_against(params)
    active = state.commitment_active(params)
    if kappa is None:
        c_star = mean_best_response(params, action, active)
    else:
        c_star = local_best_response(params, action, kappa, active)
    inv = aggregate_investment(state, action, params)
    var = investment_variance(state, action, params, c_star=c_star)
    return (
        params.lambda_ * inv.i_total
        - params.gamma * var
        - _central_cost(action.p, action.m, params)
        - params.psi * state.l
    )
