"""Stage orchestration: shock construction, solving, simulation, estimation, reports.

Stages run in dependency order (``shock, solve, simulate, irf, report``);
each writes its artifacts atomically (temp file + rename) into the configured
output directory, and the run closes with a ``manifest.json`` echoing the
config and digesting every artifact. Identical configs (same seeds) produce
byte-identical numeric artifacts.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .config import RunConfig
from .errors import ConfigError, NccError
from .localproj import IrfResult, MacroPanel, estimate_irf, significance_table
from .model import PolicyAction
from .plotting import render_irf_plot
from .shocks import (
    MinuteBarSeries,
    ShockSeries,
    build_quarterly_shock_series,
    equal_weight_shock,
    opening_gap_shock,
)
from .simulate import path_seed, simulate_ensemble, simulate_path
from .solver import read_policy_csv, solve_value_iteration, write_policy_csv, write_solve_manifest

__all__ = ["RunManifest", "run_pipeline", "STAGE_ORDER", "write_atomic"]

STAGE_ORDER = ("shock", "solve", "simulate", "irf", "report")


@dataclass
class RunManifest:
    """Record of one pipeline invocation."""

    tool: str
    stages: list
    complete: bool
    config: dict
    artifacts: dict = field(default_factory=dict)
    timings_s: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "tool": self.tool,
            "stages": self.stages,
            "complete": self.complete,
            "config": self.config,
            "artifacts": self.artifacts,
            "timings_s": self.timings_s,
        }
        return json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"


def write_atomic(path: Path, data) -> None:
    """Write text or bytes to ``path`` via a temp file and atomic rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    mode = "wb" if isinstance(data, bytes) else "w"
    kwargs = {} if isinstance(data, bytes) else {"encoding": "utf-8"}
    with open(tmp, mode, **kwargs) as fh:
        fh.write(data)
    os.replace(tmp, path)


def _digest(path: Path) -> dict:
    data = Path(path).read_bytes()
    return {"sha256": hashlib.sha256(data).hexdigest(), "bytes": len(data)}


def _frame_csv(frame) -> str:
    return frame.to_csv(index=False)


def validate_for_stages(config: RunConfig, stages) -> None:
    """Check every precondition of the requested stages before running anything."""
    unknown = set(stages) - set(STAGE_ORDER)
    if unknown:
        raise ConfigError(f"unknown stage(s): {sorted(unknown)}")
    out_dir = config.output_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(out_dir, os.W_OK):
        raise ConfigError(f"output directory not writable: {out_dir}")

    if "solve" in stages or "simulate" in stages:
        config.model_params()
        config.grid_spec()
    if "simulate" in stages:
        sim = config.simulation()
        if sim["policy"] == "solved" and "solve" not in stages:
            policy_csv = out_dir / "policy.csv"
            if not policy_csv.exists():
                raise ConfigError(
                    f"simulation.policy is 'solved' but no solve stage requested and "
                    f"{policy_csv} does not exist"
                )
    if "shock" in stages:
        shock = config.shock()
        if not shock["components"]:
            raise ConfigError("shock stage requested but shock.components is empty")
        for comp in shock["components"]:
            for side in ("preclose", "postopen"):
                if not Path(comp[side]).exists():
                    raise ConfigError(f"shock.components[{comp['name']}].{side}: file not found: {comp[side]}")
    if "irf" in stages:
        lp = config.lp()
        if lp["panel"] is None:
            raise ConfigError("irf stage requires lp.panel")
        if not Path(lp["panel"]).exists():
            raise ConfigError(f"lp.panel: file not found: {lp['panel']}")
        if lp["shock_series"] is not None:
            if not Path(lp["shock_series"]).exists():
                raise ConfigError(f"lp.shock_series: file not found: {lp['shock_series']}")
        elif "shock" not in stages and not (out_dir / "shock_series.csv").exists():
            raise ConfigError(
                f"irf stage needs a shock series: run the shock stage, set lp.shock_series, "
                f"or provide {out_dir / 'shock_series.csv'}"
            )
    if "report" in stages and "irf" not in stages:
        lp = config.lp()
        dep_vars = lp["dep_vars"]
        if dep_vars:
            for var in dep_vars:
                irf_csv = out_dir / f"irf_{var}.csv"
                if not irf_csv.exists():
                    raise ConfigError(f"report stage input missing: {irf_csv}")
        elif not list(out_dir.glob("irf_*.csv")):
            raise ConfigError(f"report stage finds no irf_*.csv files in {out_dir}")


def run_pipeline(config: RunConfig, stages) -> RunManifest:
    """Run the requested stages in dependency order and write the manifest.

    An empty stage set validates the output directory, writes an empty
    manifest, and succeeds. On stage failure a partial manifest marked
    incomplete is written before the error propagates.
    """
    stages = list(stages)
    validate_for_stages(config, stages)
    ordered = [s for s in STAGE_ORDER if s in stages]
    out_dir = config.output_dir()

    manifest = RunManifest(
        tool=f"ncc {__version__}", stages=ordered, complete=False, config=config.data
    )
    runners = {
        "shock": _stage_shock,
        "solve": _stage_solve,
        "simulate": _stage_simulate,
        "irf": _stage_irf,
        "report": _stage_report,
    }
    shared: dict = {}
    try:
        for name in ordered:
            started = time.perf_counter()
            artifacts = runners[name](config, out_dir, shared)
            manifest.timings_s[name] = round(time.perf_counter() - started, 6)
            for art in artifacts:
                manifest.artifacts[art.name] = _digest(art)
    except Exception:
        write_atomic(out_dir / "manifest.json", manifest.to_json())
        raise
    manifest.complete = True
    write_atomic(out_dir / "manifest.json", manifest.to_json())
    return manifest


# --- individual stages -------------------------------------------------------


def _stage_shock(config: RunConfig, out_dir: Path, shared: dict):
    shock_cfg = config.shock()
    k = shock_cfg["window"]
    names, values = [], []
    for comp in shock_cfg["components"]:
        pre = MinuteBarSeries.from_csv(comp["preclose"], label=f"{comp['name']} pre-close")
        post = MinuteBarSeries.from_csv(comp["postopen"], label=f"{comp['name']} post-open")
        names.append(comp["name"])
        values.append(opening_gap_shock(pre, post, k=k))
    aggregate = equal_weight_shock(values, absolute=shock_cfg["absolute"])
    series = build_quarterly_shock_series(
        aggregate,
        shock_cfg["base_quarter"],
        [(r["quarter"], r["value"]) for r in shock_cfg["reinforcements"]],
        shock_cfg["range_start"],
        shock_cfg["range_end"],
    )
    shared["shock_series"] = series

    import pandas as pd

    comp_frame = pd.DataFrame({"name": names, "shock": values})
    components_csv = out_dir / "shock_components.csv"
    write_atomic(components_csv, _frame_csv(comp_frame))
    series_csv = out_dir / "shock_series.csv"
    write_atomic(series_csv, _frame_csv(series.to_frame()))
    return [components_csv, series_csv]


def _stage_solve(config: RunConfig, out_dir: Path, shared: dict):
    solved = solve_value_iteration(config.grid_spec(), config.model_params())
    shared["solved_policy"] = solved
    policy_csv = out_dir / "policy.csv"
    manifest_txt = out_dir / "solve_manifest.txt"
    tmp_csv = policy_csv.with_name(policy_csv.name + ".tmp")
    write_policy_csv(solved, tmp_csv)
    os.replace(tmp_csv, policy_csv)
    tmp_txt = manifest_txt.with_name(manifest_txt.name + ".tmp")
    write_solve_manifest(solved, tmp_txt)
    os.replace(tmp_txt, manifest_txt)
    return [policy_csv, manifest_txt]


def _stage_simulate(config: RunConfig, out_dir: Path, shared: dict):
    params = config.model_params()
    sim = config.simulation()
    if sim["policy"] == "solved":
        policy = shared.get("solved_policy")
        if policy is None:
            policy = read_policy_csv(out_dir / "policy.csv", config.grid_spec())
    else:
        policy = PolicyAction(p=float(sim["policy"]["p"]), m=float(sim["policy"]["m"]))
    common = dict(
        theta0=sim["theta0"],
        l0=sim["l0"],
        omega0=sim["omega0"],
        kappa_mode=sim["kappa_mode"],
        kappa_fixed=sim["kappa_fixed"],
    )
    traj = simulate_path(
        policy, params, sim["t_max"], path_seed(sim["base_seed"], 0), **common
    )
    stats = simulate_ensemble(
        policy, params, sim["t_max"], sim["n_paths"], sim["base_seed"], **common
    )
    trajectory_csv = out_dir / "trajectory.csv"
    ensemble_csv = out_dir / "ensemble.csv"
    write_atomic(trajectory_csv, _frame_csv(traj.to_frame()))
    write_atomic(ensemble_csv, _frame_csv(stats.to_frame()))
    return [trajectory_csv, ensemble_csv]


def _stage_irf(config: RunConfig, out_dir: Path, shared: dict):
    lp = config.lp()
    panel = MacroPanel.from_csv(lp["panel"])
    if lp["shock_series"] is not None:
        shocks = ShockSeries.from_csv(lp["shock_series"])
    elif "shock_series" in shared:
        shocks = shared["shock_series"]
    else:
        shocks = ShockSeries.from_csv(out_dir / "shock_series.csv")
    dep_vars = lp["dep_vars"] or list(panel.dep_vars)

    artifacts = []
    results = []
    for var in dep_vars:
        result = estimate_irf(
            panel,
            shocks,
            var,
            lp["max_horizon"],
            hac_lag=lp["hac_lag"],
            confidence_level=lp["confidence_level"],
            use_t_dist=lp["use_t_dist"],
            df_correction=lp["df_correction"],
        )
        results.append(result)
        irf_csv = out_dir / f"irf_{var}.csv"
        write_atomic(irf_csv, _frame_csv(result.to_frame()))
        artifacts.append(irf_csv)
    text, frame = significance_table(results)
    sig_txt = out_dir / "significance.txt"
    sig_csv = out_dir / "significance.csv"
    write_atomic(sig_txt, text + "\n")
    write_atomic(sig_csv, _frame_csv(frame))
    shared["irf_results"] = {r.dep_var: r for r in results}
    artifacts.extend([sig_txt, sig_csv])
    return artifacts


def _stage_report(config: RunConfig, out_dir: Path, shared: dict):
    lp = config.lp()
    results = shared.get("irf_results")
    if results is None:
        dep_vars = lp["dep_vars"]
        if not dep_vars:
            dep_vars = sorted(
                p.name[len("irf_"):-len(".csv")] for p in out_dir.glob("irf_*.csv")
            )
        results = {}
        for var in dep_vars:
            irf_csv = out_dir / f"irf_{var}.csv"
            if not irf_csv.exists():
                raise NccError(f"report stage input missing: {irf_csv}")
            results[var] = IrfResult.from_csv(
                irf_csv, dep_var=var, confidence_level=lp["confidence_level"]
            )
    artifacts = []
    for var, result in results.items():
        svg_path = out_dir / f"irf_{var}.svg"
        write_atomic(svg_path, render_irf_plot(result))
        artifacts.append(svg_path)
    return artifacts
