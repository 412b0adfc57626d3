"""Structural parameters of the narrative-credibility game.

``ModelParams`` collects every period-level constant: utility weights for the
central government, the execution-cost distribution faced by local
governments, market-composition constants, belief/skeptic/institutionalization
dynamics, noise scales, and the commitment machinery (thresholds and floor).

The on-disk form is a flat key/value mapping whose keys match the field names
below one-to-one (the growth weight is spelled ``lambda`` in config files and
``lambda_`` in Python, where ``lambda`` is reserved).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import ConfigError, DomainError

__all__ = ["ModelParams", "MODEL_PARAM_KEYS"]


#: Config-file key for each dataclass field (identical except for ``lambda``).
_FIELD_TO_KEY = {"lambda_": "lambda"}
_KEY_TO_FIELD = {v: k for k, v in _FIELD_TO_KEY.items()}


@dataclass(frozen=True)
class ModelParams:
    """All structural constants of the model.

    Attributes
    ----------
    lambda_ : float
        Weight on expected aggregate investment in the central objective
        (>= 0; zero degenerates to a pure cost problem).
    gamma : float
        Aversion to investment volatility (>= 0); zero disables the variance
        penalty entirely.
    psi : float
        Cost per unit of institutionalization stock carried (>= 0).
    delta : float
        Discount factor in [0, 1); zero gives the myopic one-period problem.
    xi : float
        Local-government benefit per unit of market credibility (>= 0).
    beta0 : float
        Baseline deviation-penalty weight before monitoring is added (>= 0).
    eta : float
        Speed at which market belief moves toward the observed signal,
        in (0, 1].
    n_s : float
        Per-unit-of-execution decay rate of the skeptic share (> 0).
    phi : float
        Institutionalization accrual rate per period of high credibility (> 0).
    alpha : float
        Fixed believer share of market participants, in [0, 1).
    k_b, k_r, k_s : float
        Investment sensitivities of believers, rational participants and
        skeptics (> 0).
    theta_bar : float
        Skeptics' anchored belief (long-run average credibility), in [0, 1].
    kappa_lo, kappa_hi : float
        Support of the uniform execution-cost draw, 0 < kappa_lo < kappa_hi.
    sigma_eps : float
        Standard deviation of belief-updating noise (>= 0).
    sigma_nu : float
        Standard deviation of execution noise (>= 0).
    theta_threshold : float
        Credibility level above which institutionalization accrues (>= 0).
    l_threshold : float
        Institutionalization stock at which the commitment floor activates
        (>= 0).
    c_min : float
        Execution floor enforced once commitment is active, in [0, 1].
    cost_p, cost_m : float
        Quadratic cost coefficients on narrative precision and monitoring
        (>= 0).
    """

    lambda_: float
    gamma: float
    psi: float
    delta: float
    xi: float
    beta0: float
    eta: float
    n_s: float
    phi: float
    alpha: float
    k_b: float
    k_r: float
    k_s: float
    theta_bar: float
    kappa_lo: float
    kappa_hi: float
    sigma_eps: float
    sigma_nu: float
    theta_threshold: float
    l_threshold: float
    c_min: float
    cost_p: float
    cost_m: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise DomainError(f"parameter {_key(f.name)!r} must be a real number, got {v!r}")
            if not math.isfinite(v):
                raise DomainError(f"parameter {_key(f.name)!r} must be finite, got {v!r}")
            object.__setattr__(self, f.name, float(v))
        _require(self.lambda_ >= 0, "lambda must be >= 0")
        _require(self.gamma >= 0, "gamma must be >= 0")
        _require(self.psi >= 0, "psi must be >= 0")
        _require(0.0 <= self.delta < 1.0, "delta must lie in [0, 1)")
        _require(self.xi >= 0, "xi must be >= 0")
        _require(self.beta0 >= 0, "beta0 must be >= 0")
        _require(0.0 < self.eta <= 1.0, "eta must lie in (0, 1]")
        _require(self.n_s > 0, "n_s must be > 0")
        _require(self.phi > 0, "phi must be > 0")
        _require(0.0 <= self.alpha < 1.0, "alpha must lie in [0, 1)")
        _require(self.k_b > 0, "k_b must be > 0")
        _require(self.k_r > 0, "k_r must be > 0")
        _require(self.k_s > 0, "k_s must be > 0")
        _require(0.0 <= self.theta_bar <= 1.0, "theta_bar must lie in [0, 1]")
        _require(0.0 < self.kappa_lo < self.kappa_hi, "need 0 < kappa_lo < kappa_hi")
        _require(self.sigma_eps >= 0, "sigma_eps must be >= 0")
        _require(self.sigma_nu >= 0, "sigma_nu must be >= 0")
        _require(self.theta_threshold >= 0, "theta_threshold must be >= 0")
        _require(self.l_threshold >= 0, "l_threshold must be >= 0")
        _require(0.0 <= self.c_min <= 1.0, "c_min must lie in [0, 1]")
        _require(self.cost_p >= 0, "cost_p must be >= 0")
        _require(self.cost_m >= 0, "cost_m must be >= 0")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "ModelParams":
        """Build from a flat key/value mapping; unknown or missing keys error."""
        unknown = set(mapping) - set(MODEL_PARAM_KEYS)
        if unknown:
            raise ConfigError(f"unknown model parameter key(s): {sorted(unknown)}")
        missing = set(MODEL_PARAM_KEYS) - set(mapping)
        if missing:
            raise ConfigError(f"missing model parameter key(s): {sorted(missing)}")
        return cls(**{_KEY_TO_FIELD.get(k, k): v for k, v in mapping.items()})

    def to_mapping(self) -> dict:
        """Flat key/value form suitable for config serialization."""
        return {_key(f.name): getattr(self, f.name) for f in fields(self)}

    def replace(self, **changes) -> "ModelParams":
        """Return a copy with the named fields replaced (re-validated)."""
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values.update(changes)
        return ModelParams(**values)

    @property
    def l_tilde_threshold(self) -> float:
        """Commitment threshold expressed on the compactified l/(1+l) axis."""
        return self.l_threshold / (1.0 + self.l_threshold)


def _key(field_name: str) -> str:
    return _FIELD_TO_KEY.get(field_name, field_name)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


MODEL_PARAM_KEYS = tuple(_key(f.name) for f in fields(ModelParams))
