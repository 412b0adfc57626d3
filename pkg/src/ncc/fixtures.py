"""Synthetic input generators for demos and tests.

Real minute-level index data and official quarterly macro series are licensed
and do not ship with the package; these generators produce deterministic
stand-ins with the right shapes: minute-bar sessions whose window means hit
prescribed opening gaps, and a quarterly macro panel with persistent, seeded
series.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pandas as pd

from .localproj import DEFAULT_CONTROLS, DEFAULT_DEP_VARS, MacroPanel
from .params import ModelParams
from .shocks import MinuteBarSeries, quarter_range

__all__ = [
    "baseline_params",
    "COMPONENT_GAPS",
    "make_minute_bars",
    "write_market_fixtures",
    "make_macro_panel",
    "demo_config_data",
]

#: Opening-gap magnitudes of the three index fixtures (raw return fractions).
COMPONENT_GAPS = {"csi300": 0.001721, "chinext": 0.002463, "etf50": 0.000435}

_BASE_PRICES = {"csi300": 3000.0, "chinext": 2100.0, "etf50": 2.25}
_PRE_DATE = "2016-05-19"
_POST_DATE = "2016-05-20"


def baseline_params(**overrides) -> ModelParams:
    """A moderate, well-behaved parameter set used across demos and tests."""
    values = dict(
        lambda_=1.0,
        gamma=0.5,
        psi=0.05,
        delta=0.9,
        xi=1.0,
        beta0=0.5,
        eta=0.3,
        n_s=0.1,
        phi=0.2,
        alpha=0.2,
        k_b=1.0,
        k_r=1.0,
        k_s=1.0,
        theta_bar=0.5,
        kappa_lo=1.0,
        kappa_hi=2.0,
        sigma_eps=0.05,
        sigma_nu=0.05,
        theta_threshold=0.6,
        l_threshold=0.5,
        c_min=0.3,
        cost_p=0.1,
        cost_m=0.1,
    )
    values.update(overrides)
    return ModelParams(**values)


def make_minute_bars(
    index_name: str,
    gap: float,
    base_price: float,
    session_bars: int = 30,
    window: int = 10,
    seed: int = 20160519,
):
    """Pre-close and post-open sessions whose window means realize ``gap``.

    The last ``window`` pre-close bars oscillate symmetrically around
    ``base_price`` and the first ``window`` post-open bars around
    ``base_price * (1 + gap)``, so the MA(window) opening gap equals ``gap``
    up to round-off. Bars outside the pinned windows carry seeded drift.
    """
    if session_bars < window:
        raise ValueError("session must hold at least one full window")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    amp = 4e-4 * base_price
    pattern = np.resize([1.0, -1.0], window)  # even window -> sums to zero

    lead = base_price + amp * np.cumsum(rng.normal(0.0, 0.3, size=session_bars - window))
    pre_prices = np.concatenate([lead, base_price + amp * pattern])
    pre_times = np.datetime64(f"{_PRE_DATE}T14:30") + np.arange(session_bars)

    post_level = base_price * (1.0 + gap)
    tail = post_level + amp * np.cumsum(rng.normal(0.0, 0.3, size=session_bars - window))
    post_prices = np.concatenate([post_level + amp * pattern, tail])
    post_times = np.datetime64(f"{_POST_DATE}T09:30") + np.arange(session_bars)

    pre = MinuteBarSeries(pre_times, pre_prices, label=f"{index_name} pre-close")
    post = MinuteBarSeries(post_times, post_prices, label=f"{index_name} post-open")
    return pre, post


def write_market_fixtures(directory, session_bars: int = 30, window: int = 10) -> list:
    """Write the three-index minute-bar fixture CSVs; returns component config entries."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    components = []
    for i, (name, gap) in enumerate(COMPONENT_GAPS.items()):
        pre, post = make_minute_bars(
            name, gap, _BASE_PRICES[name], session_bars, window, seed=20160519 + i
        )
        pre_path = directory / f"{name}_{_PRE_DATE}_preclose.csv"
        post_path = directory / f"{name}_{_POST_DATE}_postopen.csv"
        pre.to_csv(pre_path)
        post.to_csv(post_path)
        components.append(
            {"name": name, "preclose": str(pre_path), "postopen": str(post_path)}
        )
    return components


def make_macro_panel(
    start="2016Q1", end="2023Q4", seed: int = 7341, controls=DEFAULT_CONTROLS
) -> MacroPanel:
    """Seeded quarterly panel with the standard dependent and control columns.

    Each series is a persistent autoregression around a plausible level; the
    content is synthetic and only the shapes matter.
    """
    index = quarter_range(start, end)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    n = len(index)

    def ar1(level, scale, rho=0.7):
        e = rng.normal(0.0, scale, size=n)
        x = np.empty(n)
        x[0] = level + e[0]
        for t in range(1, n):
            x[t] = level + rho * (x[t - 1] - level) + e[t]
        return x

    levels = {
        "gdp": (6.5, 0.5),
        "labor_productivity_growth": (5.8, 0.6),
        "tech_expenditure": (4.0, 0.8),
        "manufacturing_fai_growth": (5.0, 1.0),
        "gov_consumption_share": (16.0, 0.3),
        "industry_value_added_share": (32.0, 0.5),
        "shibor_3m": (3.2, 0.25),
        "m2_growth": (9.5, 0.7),
        "dollar_index": (96.0, 2.0),
        "usdcny": (6.7, 0.15),
    }
    data = {col: ar1(level, scale) for col, (level, scale) in levels.items()}
    frame = pd.DataFrame(data, index=index)[list(DEFAULT_DEP_VARS) + list(controls)]
    return MacroPanel(frame=frame, controls=tuple(controls))


def demo_config_data(input_dir, output_dir, components) -> dict:
    """Fully populated config mapping driving the five-stage pipeline."""
    params = baseline_params()
    return {
        "model": params.to_mapping(),
        "grid": {"n_theta": 5, "n_ltilde": 5, "n_omega": 5, "n_p": 5, "n_m": 5,
                 "quad_nodes": 7, "tol": 1e-8, "max_iter": 5000},
        "simulation": {
            "t_max": 120,
            "n_paths": 200,
            "base_seed": 42,
            "theta0": 0.2,
            "l0": 0.0,
            "omega0": 0.3,
            "policy": "solved",
            "kappa_mode": "iid",
            "kappa_fixed": None,
        },
        "shock": {
            "window": 10,
            "absolute": False,
            "base_quarter": "2016Q2",
            "range_start": "2016Q1",
            "range_end": "2023Q4",
            "components": components,
            "reinforcements": [
                {"quarter": "2017Q4", "value": 0.0001},
                {"quarter": "2022Q4", "value": 0.0001},
            ],
        },
        "lp": {
            "panel": str(Path(input_dir) / "macro_panel.csv"),
            "dep_vars": None,
            "max_horizon": 12,
            "hac_lag": None,
            "confidence_level": 0.95,
            "use_t_dist": False,
            "shock_series": None,
        },
        "output": {"dir": str(output_dir)},
    }
