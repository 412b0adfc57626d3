"""Trajectory simulation under fixed or solved policies.

Periods are numbered 1..t_max. Each recorded row carries the start-of-period
state, the controls and cost draw applied during the period, the ideal and
realized execution, the investment breakdown, the central period payoff, and
whether the commitment floor governed the period. Hitting times (skeptic
extinction, commitment activation) follow the convention "first period whose
end-of-period value crosses the threshold".

Randomness uses counter-based Philox streams keyed by (base seed, path
index); each path draws its cost/execution/belief noise blocks up front in a
fixed order, so results do not depend on scheduling and identical seeds give
bit-identical trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DomainError, InvariantError
from .model import (
    EconState,
    PolicyAction,
    _best_response_raw,
    _central_cost,
    _investment_components,
    _one_step_variance,
)
from .params import ModelParams
from .solver import SolvedPolicy

__all__ = [
    "Trajectory",
    "EnsembleStats",
    "simulate_path",
    "simulate_ensemble",
    "detect_commitment_transition",
    "path_seed",
]

#: Column order of the trajectory CSV export.
TRAJECTORY_COLUMNS = (
    "period",
    "theta",
    "l",
    "l_tilde",
    "omega",
    "p",
    "m",
    "kappa",
    "c_star",
    "c_realized",
    "i_b",
    "i_r",
    "i_s",
    "i_total",
    "central_utility",
    "commitment_active",
)

ENSEMBLE_COLUMNS = (
    "period",
    "theta_mean",
    "theta_var",
    "omega_mean",
    "omega_var",
    "itotal_mean",
    "itotal_var",
    "l_mean",
    "l_var",
)


@dataclass
class Trajectory:
    """One simulated path; every array has length ``t_max`` (periods 1-based)."""

    seed: object
    t_max: int
    theta: np.ndarray
    l: np.ndarray
    omega: np.ndarray
    p: np.ndarray
    m: np.ndarray
    kappa: np.ndarray
    c_star: np.ndarray
    c_realized: np.ndarray
    i_b: np.ndarray
    i_r: np.ndarray
    i_s: np.ndarray
    i_total: np.ndarray
    central_utility: np.ndarray
    commitment_active: np.ndarray
    theta_final: float
    l_final: float
    omega_final: float

    @property
    def l_tilde(self) -> np.ndarray:
        return self.l / (1.0 + self.l)

    @property
    def l_end(self) -> np.ndarray:
        """End-of-period institutionalization stock, one entry per period."""
        return np.append(self.l[1:], self.l_final)

    def to_frame(self) -> pd.DataFrame:
        data = {
            "period": np.arange(1, self.t_max + 1),
            "theta": self.theta,
            "l": self.l,
            "l_tilde": self.l_tilde,
            "omega": self.omega,
            "p": self.p,
            "m": self.m,
            "kappa": self.kappa,
            "c_star": self.c_star,
            "c_realized": self.c_realized,
            "i_b": self.i_b,
            "i_r": self.i_r,
            "i_s": self.i_s,
            "i_total": self.i_total,
            "central_utility": self.central_utility,
            "commitment_active": self.commitment_active.astype(int),
        }
        return pd.DataFrame(data, columns=list(TRAJECTORY_COLUMNS))

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)


@dataclass
class EnsembleStats:
    """Cross-path per-period statistics plus commitment-transition times.

    Variances are population variances (ddof=0) so a single path yields zeros
    rather than undefined values. ``transition_period`` holds, per path, the
    first period whose end-of-period stock met the commitment threshold, or 0
    for paths that never transitioned.
    """

    base_seed: int
    n_paths: int
    t_max: int
    theta_mean: np.ndarray
    theta_var: np.ndarray
    omega_mean: np.ndarray
    omega_var: np.ndarray
    itotal_mean: np.ndarray
    itotal_var: np.ndarray
    l_mean: np.ndarray
    l_var: np.ndarray
    transition_period: np.ndarray

    def transition_summary(self) -> dict:
        hit = self.transition_period[self.transition_period > 0]
        summary = {
            "n_paths": self.n_paths,
            "n_transitioned": int(hit.size),
            "n_never": int(self.n_paths - hit.size),
        }
        if hit.size:
            summary.update(
                first=int(hit.min()),
                last=int(hit.max()),
                mean=float(hit.mean()),
                median=float(np.median(hit)),
            )
        return summary

    def to_frame(self) -> pd.DataFrame:
        data = {
            "period": np.arange(1, self.t_max + 1),
            "theta_mean": self.theta_mean,
            "theta_var": self.theta_var,
            "omega_mean": self.omega_mean,
            "omega_var": self.omega_var,
            "itotal_mean": self.itotal_mean,
            "itotal_var": self.itotal_var,
            "l_mean": self.l_mean,
            "l_var": self.l_var,
        }
        return pd.DataFrame(data, columns=list(ENSEMBLE_COLUMNS))

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)


def path_seed(base_seed: int, path_index: int) -> np.random.SeedSequence:
    """Seed of ensemble path ``path_index`` under ``base_seed``."""
    return np.random.SeedSequence(entropy=base_seed, spawn_key=(path_index,))


def _draw_blocks(seed, t_max: int, params: ModelParams, kappa_mode: str, kappa_fixed):
    """Pre-draw all noise for one path: cost, execution and belief blocks in fixed order."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(int(seed))
    rng = np.random.Generator(np.random.Philox(seed))
    kappa_iid = rng.uniform(params.kappa_lo, params.kappa_hi, size=t_max)
    nu = rng.normal(0.0, params.sigma_nu, size=t_max)
    eps = rng.normal(0.0, params.sigma_eps, size=t_max)
    if kappa_mode == "fixed":
        kappa = np.full(t_max, float(kappa_fixed))
    else:
        kappa = kappa_iid
    return kappa, nu, eps


def _validate_sim_args(params, t_max, theta0, l0, omega0, kappa_mode, kappa_fixed):
    if t_max < 1:
        raise DomainError(f"t_max must be >= 1, got {t_max}")
    EconState(theta=theta0, l=l0, omega=omega0)
    if params.alpha + omega0 > 1.0 + 1e-12:
        raise DomainError(
            f"initial skeptic share {omega0} plus believer share {params.alpha} exceeds 1"
        )
    if kappa_mode not in ("iid", "fixed"):
        raise DomainError(f"kappa_mode must be 'iid' or 'fixed', got {kappa_mode!r}")
    if kappa_mode == "fixed":
        if kappa_fixed is None or not np.isfinite(kappa_fixed) or kappa_fixed <= 0:
            raise DomainError(f"kappa_fixed must be a finite positive real, got {kappa_fixed!r}")


class _Recorder:
    """Accumulates per-period records for ``n`` paths simulated in lockstep."""

    FULL_FIELDS = (
        "theta", "l", "omega", "p", "m", "kappa", "c_star", "c_realized",
        "i_b", "i_r", "i_s", "i_total", "central_utility", "commitment_active",
    )
    STAT_FIELDS = ("theta", "omega", "i_total", "l")

    def __init__(self, n: int, t_max: int, full: bool):
        self.full = full
        fields = self.FULL_FIELDS if full else self.STAT_FIELDS
        self.buf = {name: np.empty((t_max, n)) for name in fields}

    def record(self, t: int, values: dict) -> None:
        for name, arr in self.buf.items():
            arr[t - 1] = values[name]


def _run(policy, params, t_max, blocks, theta0, l0, omega0, full: bool):
    """Vectorized recursion over ``n`` lockstep paths; returns recorder + finals + transitions."""
    kappa, nu, eps = blocks  # each [t_max, n]
    n = kappa.shape[1]
    theta = np.full(n, float(theta0))
    l = np.full(n, float(l0))
    omega = np.full(n, float(omega0))
    rec = _Recorder(n, t_max, full)
    transition = np.zeros(n, dtype=int)
    omega_cap = 1.0 - params.alpha

    fixed_action = isinstance(policy, PolicyAction)
    for t in range(1, t_max + 1):
        active = l >= params.l_threshold
        if fixed_action:
            p = np.full(n, policy.p)
            m = np.full(n, policy.m)
        else:
            p, m = policy.policy_at(theta, l / (1.0 + l), omega)
        k_t = kappa[t - 1]
        b = params.beta0 + m
        c_star = _best_response_raw(b, p, k_t)
        c_star = np.where(active, np.maximum(c_star, params.c_min), c_star)
        c_real = np.clip(c_star + nu[t - 1], 0.0, 1.0)

        i_b, i_r, i_s = _investment_components(theta, omega, p, params)
        i_total = i_b + i_r + i_s
        omega_exante = np.maximum(omega - params.n_s * c_star, 0.0)
        utility = (
            params.lambda_ * i_total
            - params.gamma * _one_step_variance(omega_exante, p, params)
            - _central_cost(p, m, params)
            - params.psi * l
        )

        rec.record(
            t,
            {
                "theta": theta, "l": l, "omega": omega, "p": p, "m": m,
                "kappa": k_t, "c_star": c_star, "c_realized": c_real,
                "i_b": i_b, "i_r": i_r, "i_s": i_s, "i_total": i_total,
                "central_utility": utility, "commitment_active": active,
            },
        )

        l_next = l + np.where(theta >= params.theta_threshold, params.phi * theta, 0.0)
        theta = np.clip(theta + params.eta * (c_real * p - theta) + eps[t - 1], 0.0, 1.0)
        omega = np.maximum(omega - params.n_s * c_real, 0.0)
        l = l_next

        newly = (transition == 0) & (l >= params.l_threshold)
        transition[newly] = t

        bad = (omega > omega_cap + 1e-12) | ~np.isfinite(l) | ~np.isfinite(theta)
        if bad.any():
            raise InvariantError(
                f"state left its domain at period {t} (path index {int(np.argmax(bad))})"
            )

    return rec, theta, l, omega, transition


def simulate_path(
    policy: PolicyAction | SolvedPolicy,
    params: ModelParams,
    t_max: int,
    seed,
    theta0: float = 0.0,
    l0: float = 0.0,
    omega0: float = 0.0,
    kappa_mode: str = "iid",
    kappa_fixed: float | None = None,
) -> Trajectory:
    """Simulate one path of length ``t_max`` from the given initial state.

    ``policy`` is either a fixed action applied every period or a solved
    policy looked up (multilinearly interpolated) at the current state.
    ``seed`` may be an integer or a ``numpy.random.SeedSequence``. The cost
    draw is i.i.d. uniform each period by default; ``kappa_mode='fixed'``
    holds it at ``kappa_fixed`` instead.
    """
    _validate_sim_args(params, t_max, theta0, l0, omega0, kappa_mode, kappa_fixed)
    kappa, nu, eps = _draw_blocks(seed, t_max, params, kappa_mode, kappa_fixed)
    blocks = (kappa[:, None], nu[:, None], eps[:, None])
    rec, theta_f, l_f, omega_f, _ = _run(policy, params, t_max, blocks, theta0, l0, omega0, full=True)
    arrays = {name: arr[:, 0].copy() for name, arr in rec.buf.items()}
    arrays["commitment_active"] = arrays["commitment_active"].astype(bool)
    return Trajectory(
        seed=seed,
        t_max=t_max,
        theta=arrays["theta"],
        l=arrays["l"],
        omega=arrays["omega"],
        p=arrays["p"],
        m=arrays["m"],
        kappa=arrays["kappa"],
        c_star=arrays["c_star"],
        c_realized=arrays["c_realized"],
        i_b=arrays["i_b"],
        i_r=arrays["i_r"],
        i_s=arrays["i_s"],
        i_total=arrays["i_total"],
        central_utility=arrays["central_utility"],
        commitment_active=arrays["commitment_active"],
        theta_final=float(theta_f[0]),
        l_final=float(l_f[0]),
        omega_final=float(omega_f[0]),
    )


def simulate_ensemble(
    policy: PolicyAction | SolvedPolicy,
    params: ModelParams,
    t_max: int,
    n_paths: int,
    base_seed: int,
    theta0: float = 0.0,
    l0: float = 0.0,
    omega0: float = 0.0,
    kappa_mode: str = "iid",
    kappa_fixed: float | None = None,
) -> EnsembleStats:
    """Simulate ``n_paths`` independent paths and aggregate per-period statistics.

    Path ``i`` uses the stream ``path_seed(base_seed, i)``, so any individual
    path can be reproduced exactly with :func:`simulate_path`. Aggregation
    order is fixed by path index.
    """
    if n_paths < 1:
        raise DomainError(f"n_paths must be >= 1, got {n_paths}")
    _validate_sim_args(params, t_max, theta0, l0, omega0, kappa_mode, kappa_fixed)

    kappa = np.empty((t_max, n_paths))
    nu = np.empty((t_max, n_paths))
    eps = np.empty((t_max, n_paths))
    for i in range(n_paths):
        k_i, nu_i, eps_i = _draw_blocks(path_seed(base_seed, i), t_max, params, kappa_mode, kappa_fixed)
        kappa[:, i], nu[:, i], eps[:, i] = k_i, nu_i, eps_i

    rec, _, _, _, transition = _run(
        policy, params, t_max, (kappa, nu, eps), theta0, l0, omega0, full=False
    )
    buf = rec.buf
    return EnsembleStats(
        base_seed=base_seed,
        n_paths=n_paths,
        t_max=t_max,
        theta_mean=buf["theta"].mean(axis=1),
        theta_var=buf["theta"].var(axis=1),
        omega_mean=buf["omega"].mean(axis=1),
        omega_var=buf["omega"].var(axis=1),
        itotal_mean=buf["i_total"].mean(axis=1),
        itotal_var=buf["i_total"].var(axis=1),
        l_mean=buf["l"].mean(axis=1),
        l_var=buf["l"].var(axis=1),
        transition_period=transition,
    )


def detect_commitment_transition(traj: Trajectory, params: ModelParams) -> int | None:
    """First period whose end-of-period stock meets the commitment threshold.

    Returns the 1-based period index, or ``None`` if the trajectory never
    institutionalizes. Because the stock never decreases, a path starting at
    or above the threshold reports period 1.
    """
    hits = np.nonzero(traj.l_end >= params.l_threshold)[0]
    if hits.size == 0:
        return None
    return int(hits[0]) + 1
