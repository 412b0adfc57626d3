"""Period-mechanics tests: hand-checked values, oracles, and properties."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncc import (
    DomainError,
    EconState,
    InvariantError,
    ModelParams,
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
from ncc.errors import ConfigError
from ncc.fixtures import baseline_params
from ncc.params import MODEL_PARAM_KEYS


# --- oracles -----------------------------------------------------------------


def execution_objective(c, theta, kappa, action, params):
    """Trade-off the ideal consistency maximizes: credibility benefit minus
    half-weighted execution-cost and deviation terms (its stationarity
    condition is kappa*c + (beta0+m)*(c-p) = 0)."""
    b = params.beta0 + action.m
    return params.xi * theta - 0.5 * kappa * c * c - 0.5 * b * (c - action.p) ** 2


def grid_search_best_response(params, action, kappa, commitment_active, step=1e-4):
    """Brute-force constrained maximizer of the execution objective."""
    grid = np.arange(0.0, 1.0 + step / 2, step)
    if commitment_active:
        grid = np.unique(np.append(grid[grid >= params.c_min], params.c_min))
    b = params.beta0 + action.m
    objective = -0.5 * kappa * grid**2 - 0.5 * b * (grid - action.p) ** 2
    return float(grid[np.argmax(objective)])


# --- local best response -----------------------------------------------------


def test_best_response_hand_value():
    p = baseline_params(beta0=0.5)
    c = local_best_response(p, PolicyAction(p=0.8, m=0.5), kappa=1.0)
    assert c == pytest.approx(0.4, abs=1e-12)


def test_best_response_zero_precision(params):
    for kappa in (0.3, 1.0, 7.5):
        assert local_best_response(params, PolicyAction(p=0.0, m=0.7), kappa) == 0.0


def test_best_response_commitment_floor():
    p = baseline_params(c_min=0.5)
    a = PolicyAction(p=0.8, m=0.5)
    assert local_best_response(p, a, 1.0, commitment_active=True) == 0.5
    assert local_best_response(p, a, 1.0, commitment_active=False) == pytest.approx(0.4)


@pytest.mark.parametrize("kappa", [0.0, -1.0, math.inf, math.nan])
def test_best_response_rejects_bad_kappa(params, action, kappa):
    with pytest.raises(DomainError):
        local_best_response(params, action, kappa)


def test_best_response_matches_grid_search_oracle(rng):
    for _ in range(300):
        params = baseline_params(
            beta0=float(rng.uniform(0.0, 2.0)), c_min=float(rng.uniform(0.0, 0.9))
        )
        action = PolicyAction(p=float(rng.uniform(0.0, 1.0)), m=float(rng.uniform(0.0, 1.0)))
        kappa = float(rng.uniform(0.05, 8.0))
        active = bool(rng.integers(0, 2))
        got = local_best_response(params, action, kappa, commitment_active=active)
        want = grid_search_best_response(params, action, kappa, active)
        assert got == pytest.approx(want, abs=1e-4)


def test_best_response_maximizes_execution_objective(params, action):
    c_star = local_best_response(params, action, 1.0)
    at = execution_objective(c_star, 0.5, 1.0, action, params)
    assert at >= execution_objective(c_star + 0.01, 0.5, 1.0, action, params)
    assert at >= execution_objective(c_star - 0.01, 0.5, 1.0, action, params)


@settings(deadline=None)
@given(
    beta0=st.floats(0.0, 3.0, allow_subnormal=False),
    m=st.floats(0.0, 1.0, allow_subnormal=False),
    p=st.floats(0.01, 1.0),
    kappa=st.floats(0.05, 10.0),
)
def test_comparative_statics(beta0, m, p, kappa):
    params = baseline_params(beta0=beta0)
    action = PolicyAction(p=p, m=m)
    base = local_best_response(params, action, kappa)
    assert base <= p + 1e-15
    # strictly increasing in precision and decreasing in cost whenever the
    # penalty weight is non-negligible
    if beta0 + m > 1e-12:
        if p <= 0.999:  # full-size bump, clear of float granularity at 1.0
            assert local_best_response(params, PolicyAction(p=p + 1e-3, m=m), kappa) > base
        assert local_best_response(params, action, kappa * 1.01) < base
    # strictly increasing in monitoring whenever precision is positive
    if m <= 0.999:
        assert local_best_response(params, PolicyAction(p=p, m=m + 1e-3), kappa) > base


# --- cost-averaged best response ----------------------------------------------


def test_mean_best_response_closed_form(params, rng):
    # kappa ~ U[1,2], penalty weight 1, p = 0.8
    a = PolicyAction(p=0.8, m=0.5)
    want = 1.0 * 0.8 * math.log((2.0 + 1.0) / (1.0 + 1.0)) / (2.0 - 1.0)
    got = mean_best_response(params, a)
    assert got == pytest.approx(want, rel=1e-14)
    assert got == pytest.approx(0.3244, abs=5e-5)
    draws = rng.uniform(params.kappa_lo, params.kappa_hi, size=1_000_000)
    mc = np.mean((params.beta0 + a.m) * a.p / (draws + params.beta0 + a.m))
    se = np.std((params.beta0 + a.m) * a.p / (draws + params.beta0 + a.m)) / 1000.0
    assert got == pytest.approx(mc, abs=4 * se)


@pytest.mark.parametrize("c_min", [0.0, 0.05, 0.3, 0.345, 0.42, 0.9])
def test_mean_best_response_floor_against_dense_average(c_min):
    params = baseline_params(c_min=c_min)
    action = PolicyAction(p=0.8, m=0.5)
    kappas = np.linspace(params.kappa_lo, params.kappa_hi, 2_000_001)
    c = (params.beta0 + action.m) * action.p / (kappas + params.beta0 + action.m)
    oracle = float(np.maximum(c, c_min).mean())
    got = mean_best_response(params, action, commitment_active=True)
    assert got == pytest.approx(oracle, abs=1e-7)


def test_mean_best_response_zero_cases(params):
    assert mean_best_response(params, PolicyAction(p=0.0, m=0.5)) == 0.0
    floored = baseline_params(c_min=0.25)
    assert mean_best_response(floored, PolicyAction(p=0.0, m=0.5), commitment_active=True) == 0.25


# --- investment ---------------------------------------------------------------


def test_aggregate_investment_hand_value():
    params = baseline_params(alpha=0.2, k_b=1.0, k_r=1.0, k_s=1.0, theta_bar=0.5)
    state = EconState(theta=0.6, l=0.0, omega=0.3)
    inv = aggregate_investment(state, PolicyAction(p=0.5, m=0.5), params)
    assert inv.i_b == pytest.approx(0.10, abs=1e-15)
    assert inv.i_r == pytest.approx(0.30, abs=1e-15)
    assert inv.i_s == pytest.approx(0.15, abs=1e-15)
    assert inv.i_total == inv.i_b + inv.i_r + inv.i_s
    assert inv.i_total == pytest.approx(0.55, abs=1e-15)


def test_aggregate_investment_no_rational_participants(params):
    state = EconState(theta=0.7, l=0.0, omega=1.0 - params.alpha)
    inv = aggregate_investment(state, PolicyAction(p=0.5, m=0.0), params)
    assert inv.i_r == pytest.approx(0.0, abs=1e-15)


def test_aggregate_investment_all_zero():
    params = baseline_params(theta_bar=0.0)
    state = EconState(theta=0.0, l=0.0, omega=0.3)
    inv = aggregate_investment(state, PolicyAction(p=0.0, m=0.3), params)
    assert inv.i_total == 0.0


def test_aggregate_investment_rejects_share_violation():
    params = baseline_params(alpha=0.5)
    state = EconState(theta=0.5, l=0.0, omega=0.6)
    with pytest.raises(InvariantError):
        aggregate_investment(state, PolicyAction(p=0.5, m=0.5), params)


@settings(deadline=None)
@given(
    p=st.floats(0.0, 1.0),
    theta=st.floats(0.0, 1.0),
    theta_bar=st.floats(0.0, 1.0),
    scale=st.floats(0.1, 0.9),
)
def test_aggregate_investment_linearity(p, theta, theta_bar, scale):
    params = baseline_params(theta_bar=theta_bar)
    omega = 0.3

    def components(pp, th):
        state = EconState(theta=th, l=0.0, omega=omega)
        return aggregate_investment(state, PolicyAction(p=pp, m=0.5), params)

    assert components(scale * p, theta).i_b == pytest.approx(scale * components(p, theta).i_b, rel=1e-12, abs=1e-15)
    assert components(p, scale * theta).i_r == pytest.approx(scale * components(p, theta).i_r, rel=1e-12, abs=1e-15)
    scaled_bar = baseline_params(theta_bar=scale * theta_bar)
    state = EconState(theta=theta, l=0.0, omega=omega)
    assert aggregate_investment(state, PolicyAction(p=p, m=0.5), scaled_bar).i_s == pytest.approx(
        scale * components(p, theta).i_s, rel=1e-12, abs=1e-15
    )


# --- transitions ---------------------------------------------------------------


def test_update_belief_hand_value():
    params = baseline_params(eta=0.3)
    got = update_belief(0.5, 0.8, PolicyAction(p=0.75, m=0.0), params, eps=0.0)
    assert got == pytest.approx(0.53, abs=1e-15)


@settings(deadline=None)
@given(c=st.floats(0.0, 1.0), p=st.floats(0.0, 1.0), eta=st.floats(0.01, 1.0))
def test_update_belief_fixed_point(c, p, eta):
    params = baseline_params(eta=eta)
    theta = c * p
    assert update_belief(theta, c, PolicyAction(p=p, m=0.0), params, 0.0) == theta


def test_update_belief_clamps():
    params = baseline_params(eta=0.3)
    a = PolicyAction(p=0.5, m=0.0)
    assert update_belief(0.99, 1.0, a, params, eps=5.0) == 1.0
    assert update_belief(0.01, 0.0, a, params, eps=-5.0) == 0.0


def test_update_belief_contraction_exact_dyadic():
    # dyadic values keep the recursion exact in floating point
    params = baseline_params(eta=0.5)
    a = PolicyAction(p=0.75, m=0.0)
    c = 1.0  # signal c*p = 0.75
    theta = 0.25
    assert update_belief(theta, c, a, params, 0.0) - 0.75 == (1 - 0.5) * (theta - 0.75)


@settings(deadline=None)
@given(theta=st.floats(0.0, 1.0), c=st.floats(0.0, 1.0), p=st.floats(0.0, 1.0), eta=st.floats(0.05, 0.95))
def test_update_belief_contraction_rate(theta, c, p, eta):
    params = baseline_params(eta=eta)
    nxt = update_belief(theta, c, PolicyAction(p=p, m=0.0), params, 0.0)
    if 0.0 < nxt < 1.0:  # clamping off
        lhs = abs(nxt - c * p)
        rhs = (1 - eta) * abs(theta - c * p)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


def test_update_skeptic_share_cases(params):
    assert update_skeptic_share(0.30, 0.5, params) == pytest.approx(0.25, abs=1e-15)
    assert update_skeptic_share(0.02, 0.5, params) == 0.0
    assert update_skeptic_share(0.30, 0.0, params) == 0.30


def test_update_institutionalization_cases():
    params = baseline_params(phi=0.2, theta_threshold=0.6)
    assert update_institutionalization(1.0, 0.7, params) == pytest.approx(1.14, abs=1e-15)
    assert update_institutionalization(1.0, 0.5, params) == 1.0
    assert EconState(theta=0.5, l=1.0, omega=0.0).l_tilde == 0.5


@settings(deadline=None)
@given(
    theta=st.floats(0.0, 1.0),
    omega=st.floats(0.0, 0.8),
    l=st.floats(0.0, 50.0),
    c=st.floats(0.0, 1.0),
    eps=st.floats(-1e6, 1e6),
)
def test_transitions_stay_in_domain(theta, omega, l, c, eps):
    params = baseline_params()
    a = PolicyAction(p=0.7, m=0.4)
    nxt_theta = update_belief(theta, c, a, params, eps)
    assert 0.0 <= nxt_theta <= 1.0
    nxt_omega = update_skeptic_share(omega, c, params)
    assert 0.0 <= nxt_omega <= omega
    nxt_l = update_institutionalization(l, theta, params)
    assert nxt_l >= l
    assert 0.0 <= EconState(theta=nxt_theta, l=nxt_l, omega=nxt_omega).l_tilde < 1.0


# --- local utility --------------------------------------------------------------


def test_local_utility_hand_value():
    params = baseline_params(xi=1.0, beta0=0.5)
    got = local_utility(0.4, 0.5, 1.0, PolicyAction(p=0.8, m=0.5), params)
    assert got == pytest.approx(0.26, abs=1e-12)


def test_local_utility_zero_cost_zero_deviation():
    params = baseline_params(xi=1.0, beta0=0.5)
    a = PolicyAction(p=0.8, m=0.5)
    assert local_utility(0.8, 0.5, 0.0, a, params) == pytest.approx(params.xi * 0.5, abs=1e-15)


# --- investment variance ---------------------------------------------------------


def test_investment_variance_zero_cases():
    silent = baseline_params(sigma_eps=0.0, sigma_nu=0.0)
    state = EconState(theta=0.5, l=0.0, omega=0.3)
    assert investment_variance(state, PolicyAction(p=0.8, m=0.5), silent) == 0.0
    no_transmission = baseline_params(sigma_eps=0.0, sigma_nu=0.1)
    assert investment_variance(state, PolicyAction(p=0.0, m=0.5), no_transmission) == 0.0


def test_investment_variance_hand_value_and_monte_carlo(rng):
    # engineered so the next-period skeptic share is exactly 0.3
    params = baseline_params(
        alpha=0.2, k_r=1.0, eta=0.3, sigma_nu=0.1, sigma_eps=0.05, n_s=0.1
    )
    state = EconState(theta=0.5, l=0.0, omega=0.3)
    action = PolicyAction(p=0.8, m=0.5)
    got = investment_variance(state, action, params, c_star=0.0)
    want = 0.25 * (0.3**2 * 0.8**2 * 0.1**2 + 0.05**2)
    assert got == pytest.approx(want, rel=1e-13)
    assert got == pytest.approx(7.69e-4, rel=1e-3)

    # Monte Carlo oracle: propagate both noises through next-period belief
    n = 1_000_000
    nu = rng.normal(0.0, params.sigma_nu, n)
    eps = rng.normal(0.0, params.sigma_eps, n)
    c_star = 0.0
    omega_next = max(state.omega - params.n_s * c_star, 0.0)
    theta_next = state.theta + params.eta * ((c_star + nu) * action.p - state.theta) + eps
    i_total = (
        params.alpha * params.k_b * action.p
        + (1 - params.alpha - omega_next) * params.k_r * theta_next
        + omega_next * params.k_s * params.theta_bar
    )
    mc = i_total.var()
    assert got == pytest.approx(mc, rel=0.01)


def test_investment_variance_three_sigma_bound(rng):
    params = baseline_params(sigma_nu=0.07, sigma_eps=0.03)
    state = EconState(theta=0.4, l=0.0, omega=0.25)
    action = PolicyAction(p=0.6, m=0.4)
    c_star = mean_best_response(params, action)
    closed = investment_variance(state, action, params)

    n = 100_000
    nu = rng.normal(0.0, params.sigma_nu, n)
    eps = rng.normal(0.0, params.sigma_eps, n)
    omega_next = max(state.omega - params.n_s * c_star, 0.0)
    theta_next = state.theta + params.eta * ((c_star + nu) * action.p - state.theta) + eps
    i_total = (
        params.alpha * params.k_b * action.p
        + (1 - params.alpha - omega_next) * params.k_r * theta_next
        + omega_next * params.k_s * params.theta_bar
    )
    sample_var = i_total.var(ddof=1)
    se = sample_var * math.sqrt(2.0 / (n - 1))  # sampling error of a Gaussian variance
    assert abs(sample_var - closed) <= 3 * se


# --- central utility --------------------------------------------------------------


def test_central_period_utility_hand_value():
    # engineered components: I=0.55, Var=0.01, costs 0.025, psi*l=0.05
    params = baseline_params(
        lambda_=1.0,
        gamma=0.5,
        psi=0.05,
        alpha=0.2,
        k_b=1.0,
        k_r=1.0,
        k_s=1.0,
        theta_bar=0.5,
        beta0=0.5,
        n_s=0.4,
        sigma_nu=0.0,
        sigma_eps=1.0 / 6.0,
        cost_p=0.1,
        cost_m=0.1,
        l_threshold=10.0,
    )
    state = EconState(theta=0.6, l=1.0, omega=0.3)
    action = PolicyAction(p=0.5, m=0.5)
    # c* at kappa=1 is 0.25, so omega drops to 0.2 and exposure is 0.6
    assert local_best_response(params, action, 1.0) == pytest.approx(0.25)
    got = central_period_utility(state, action, params, kappa=1.0)
    assert got == pytest.approx(0.47, abs=1e-12)


def test_central_period_utility_all_terms_vanish():
    params = baseline_params(theta_bar=0.0, sigma_eps=0.0, sigma_nu=0.0)
    state = EconState(theta=0.0, l=0.0, omega=0.3)
    got = central_period_utility(state, PolicyAction(p=0.0, m=0.0), params, kappa=1.0)
    assert got == 0.0


def test_central_period_utility_expectation_vs_conditional(params):
    state = EconState(theta=0.5, l=0.0, omega=0.3)
    action = PolicyAction(p=0.8, m=0.5)
    expected = central_period_utility(state, action, params)
    conditional = [
        central_period_utility(state, action, params, kappa=k) for k in (1.0, 1.5, 2.0)
    ]
    assert min(conditional) <= expected <= max(conditional)


# --- parameter plumbing -------------------------------------------------------------


def test_params_mapping_round_trip(params):
    mapping = params.to_mapping()
    assert set(mapping) == set(MODEL_PARAM_KEYS)
    assert "lambda" in mapping and "lambda_" not in mapping
    assert ModelParams.from_mapping(mapping) == params


def test_params_unknown_and_missing_keys(params):
    mapping = params.to_mapping()
    mapping["mystery"] = 1.0
    with pytest.raises(ConfigError, match="mystery"):
        ModelParams.from_mapping(mapping)
    del mapping["mystery"]
    del mapping["eta"]
    with pytest.raises(ConfigError, match="eta"):
        ModelParams.from_mapping(mapping)


@pytest.mark.parametrize(
    "changes",
    [
        {"delta": 1.0},
        {"delta": -0.1},
        {"eta": 0.0},
        {"eta": 1.5},
        {"alpha": 1.0},
        {"kappa_lo": 2.0, "kappa_hi": 1.0},
        {"kappa_lo": 0.0},
        {"c_min": 1.5},
        {"sigma_eps": -0.1},
        {"n_s": 0.0},
        {"lambda_": math.inf},
    ],
)
def test_params_validation_rejects(changes):
    with pytest.raises(DomainError):
        baseline_params(**changes)


def test_econ_state_validation():
    with pytest.raises(DomainError):
        EconState(theta=1.2, l=0.0, omega=0.0)
    with pytest.raises(DomainError):
        EconState(theta=0.5, l=-0.1, omega=0.0)
    state = EconState(theta=0.5, l=3.0, omega=0.1)
    assert state.l_tilde == pytest.approx(0.75)
    assert baseline_params(l_threshold=1.0).l_tilde_threshold == 0.5
