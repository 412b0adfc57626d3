"""Run configuration: one flat structured file with a section per subsystem.

Sections are ``model`` (the structural constants, exact key names), ``grid``
(solver discretization), ``simulation``, ``shock``, ``lp`` and ``output``.
Unknown sections or keys are errors. Command-line overrides use the spelling
``--section.key=value`` with YAML-typed values. Relative input/output paths
resolve against the directory containing the config file.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import ConfigError, DomainError
from .params import ModelParams
from .solver import GridSpec

__all__ = ["RunConfig", "load_config", "serialize_config", "apply_overrides"]

_SECTIONS = ("model", "grid", "simulation", "shock", "lp", "output")

_GRID_DEFAULTS = {
    "n_theta": 5,
    "n_ltilde": 5,
    "n_omega": 5,
    "n_p": 5,
    "n_m": 5,
    "quad_nodes": 7,
    "tol": 1e-8,
    "max_iter": 5000,
}

_SIM_DEFAULTS = {
    "t_max": 200,
    "n_paths": 100,
    "base_seed": 0,
    "theta0": 0.0,
    "l0": 0.0,
    "omega0": 0.0,
    "policy": {"p": 0.8, "m": 0.5},
    "kappa_mode": "iid",
    "kappa_fixed": None,
}

_SHOCK_DEFAULTS = {
    "window": 10,
    "absolute": False,
    "base_quarter": "2016Q2",
    "range_start": "2016Q1",
    "range_end": "2023Q4",
    "components": [],
    "reinforcements": [],
}

_LP_DEFAULTS = {
    "panel": None,
    "dep_vars": None,  # None -> every non-control panel column
    "max_horizon": 12,
    "hac_lag": None,  # None -> h + 1 per horizon
    "confidence_level": 0.95,
    "use_t_dist": False,
    "df_correction": False,
    "shock_series": None,  # None -> shock stage output in the output directory
}

_OUTPUT_DEFAULTS = {"dir": "out"}


def _merged(section: str, data: dict, defaults: dict) -> dict:
    given = data.get(section, {}) or {}
    if not isinstance(given, dict):
        raise ConfigError(f"section {section!r} must be a mapping")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown key(s) in section {section!r}: {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(given)
    return merged


@dataclass
class RunConfig:
    """Raw config data plus the directory paths resolve against."""

    data: dict
    base_dir: Path

    def __post_init__(self):
        if not isinstance(self.data, dict):
            raise ConfigError("config root must be a mapping of sections")
        unknown = set(self.data) - set(_SECTIONS)
        if unknown:
            raise ConfigError(f"unknown config section(s): {sorted(unknown)}")
        self.base_dir = Path(self.base_dir)

    # --- typed section accessors (validate on use) -------------------------

    def model_params(self) -> ModelParams:
        section = self.data.get("model")
        if not section:
            raise ConfigError("config lacks the 'model' section")
        try:
            return ModelParams.from_mapping(section)
        except DomainError as exc:
            raise ConfigError(f"model section invalid: {exc}") from None

    def grid_spec(self) -> GridSpec:
        merged = _merged("grid", self.data, _GRID_DEFAULTS)
        try:
            return GridSpec(**merged)
        except DomainError as exc:
            raise ConfigError(f"grid section invalid: {exc}") from None

    def simulation(self) -> dict:
        sim = _merged("simulation", self.data, _SIM_DEFAULTS)
        policy = sim["policy"]
        if policy != "solved" and not (
            isinstance(policy, dict) and set(policy) == {"p", "m"}
        ):
            raise ConfigError(
                "simulation.policy must be 'solved' or a mapping with keys p and m"
            )
        for key in ("t_max", "n_paths", "base_seed"):
            if not isinstance(sim[key], int):
                raise ConfigError(f"simulation.{key} must be an integer")
        return sim

    def shock(self) -> dict:
        shock = _merged("shock", self.data, _SHOCK_DEFAULTS)
        components = shock["components"]
        if not isinstance(components, list):
            raise ConfigError("shock.components must be a list")
        resolved = []
        for comp in components:
            if not isinstance(comp, dict) or set(comp) != {"name", "preclose", "postopen"}:
                raise ConfigError(
                    "each shock component needs exactly the keys name, preclose, postopen"
                )
            resolved.append(
                {
                    "name": comp["name"],
                    "preclose": self.resolve(comp["preclose"]),
                    "postopen": self.resolve(comp["postopen"]),
                }
            )
        shock["components"] = resolved
        reinf = shock["reinforcements"]
        if not isinstance(reinf, list):
            raise ConfigError("shock.reinforcements must be a list")
        for item in reinf:
            if not isinstance(item, dict) or set(item) != {"quarter", "value"}:
                raise ConfigError(
                    "each reinforcement needs exactly the keys quarter, value"
                )
        if not isinstance(shock["window"], int) or shock["window"] < 1:
            raise ConfigError("shock.window must be a positive integer")
        return shock

    def lp(self) -> dict:
        lp = _merged("lp", self.data, _LP_DEFAULTS)
        if lp["panel"] is not None:
            lp["panel"] = self.resolve(lp["panel"])
        if lp["shock_series"] is not None:
            lp["shock_series"] = self.resolve(lp["shock_series"])
        if not isinstance(lp["max_horizon"], int) or lp["max_horizon"] < 1:
            raise ConfigError("lp.max_horizon must be a positive integer")
        if lp["hac_lag"] is not None and (
            not isinstance(lp["hac_lag"], int) or lp["hac_lag"] < 0
        ):
            raise ConfigError("lp.hac_lag must be null or a non-negative integer")
        if not 0.0 < lp["confidence_level"] < 1.0:
            raise ConfigError("lp.confidence_level must lie in (0, 1)")
        return lp

    def output_dir(self) -> Path:
        out = _merged("output", self.data, _OUTPUT_DEFAULTS)
        return self.resolve(out["dir"])

    def resolve(self, path) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p


def load_config(path) -> RunConfig:
    """Parse a YAML config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file {path} is not valid YAML: {exc}") from None
    if data is None:
        data = {}
    return RunConfig(data=data, base_dir=path.parent.resolve())


def serialize_config(data: dict) -> str:
    """YAML form of a config mapping; parsing it back yields an equal mapping."""
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)


def apply_overrides(data: dict, overrides) -> dict:
    """Apply ``section.key=value`` overrides (values parsed as YAML scalars)."""
    out = copy.deepcopy(data)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} must have the form section.key=value")
        key_path, raw_value = item.split("=", 1)
        parts = key_path.split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key {key_path!r} must have the form section.key")
        section, key = parts
        if section not in _SECTIONS:
            raise ConfigError(f"override names unknown section {section!r}")
        try:
            value = yaml.safe_load(raw_value)
        except yaml.YAMLError:
            raise ConfigError(f"override value {raw_value!r} is not a YAML scalar") from None
        out.setdefault(section, {})
        if not isinstance(out[section], dict):
            raise ConfigError(f"section {section!r} must be a mapping")
        out[section][key] = value
    return out
