"""Per-horizon impulse-response estimation with HAC inference.

For each horizon h the cumulative outcome change ``Y[t+h] - Y[t]`` is
regressed on the quarterly shock at t, one-quarter-lagged macro controls, a
linear trend anchored at 1 on the first sample quarter, and a pandemic-phase
dummy. The coefficient on the shock is the impulse response at h; its
standard error comes from the Bartlett-kernel (Newey-West) sandwich
covariance. Horizons whose usable sample cannot support the regression are
reported as absent rather than failing the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
import pandas as pd
from scipy import stats as sps

from .errors import DomainError, InsufficientDataError, SingularDesignError
from .shocks import ShockSeries, parse_quarter

__all__ = [
    "MacroPanel",
    "LpDesign",
    "OlsFit",
    "IrfResult",
    "DEFAULT_CONTROLS",
    "covid_dummy",
    "build_lp_dataset",
    "ols",
    "newey_west_cov",
    "estimate_irf",
    "significance_table",
]

#: Macro controls entering every regression with a one-quarter lag.
DEFAULT_CONTROLS = ("shibor_3m", "m2_growth", "dollar_index", "usdcny")

#: Dependent variables shipped in the standard panel layout.
DEFAULT_DEP_VARS = (
    "gdp",
    "labor_productivity_growth",
    "tech_expenditure",
    "manufacturing_fai_growth",
    "gov_consumption_share",
    "industry_value_added_share",
)

_SHOCK_COL = 1  # column order is fixed: const, shock, controls..., trend, d_covid


def covid_dummy(quarter) -> float:
    """Pandemic-phase dummy: 2 during 2020Q2-2020Q4, 1 during 2021Q1-2022Q4, else 0."""
    q = parse_quarter(quarter)
    if parse_quarter("2020Q2") <= q <= parse_quarter("2020Q4"):
        return 2.0
    if parse_quarter("2021Q1") <= q <= parse_quarter("2022Q4"):
        return 1.0
    return 0.0


@dataclass
class MacroPanel:
    """Quarterly macro table: dependent variables plus named controls.

    The index must be a contiguous quarterly PeriodIndex and the table must
    contain no missing values; incomplete panels are rejected at ingestion,
    never imputed.
    """

    frame: pd.DataFrame
    controls: tuple = DEFAULT_CONTROLS

    def __post_init__(self):
        if not isinstance(self.frame.index, pd.PeriodIndex):
            raise DomainError("MacroPanel index must be a quarterly PeriodIndex")
        idx = self.frame.index
        if len(idx) == 0:
            raise DomainError("MacroPanel is empty")
        expected = pd.period_range(idx[0], idx[-1], freq="Q")
        if not idx.equals(expected):
            raise DomainError("MacroPanel quarters must be contiguous and sorted")
        self.controls = tuple(self.controls)
        missing_controls = [c for c in self.controls if c not in self.frame.columns]
        if missing_controls:
            raise DomainError(f"MacroPanel lacks control column(s): {missing_controls}")
        values = self.frame.to_numpy(dtype=float)
        if np.isnan(values).any():
            rows = idx[np.isnan(values).any(axis=1)]
            raise DomainError(f"MacroPanel contains missing values (first at {rows[0]})")
        self.frame = self.frame.astype(float)

    @property
    def quarters(self) -> pd.PeriodIndex:
        return self.frame.index

    @property
    def dep_vars(self) -> tuple:
        return tuple(c for c in self.frame.columns if c not in self.controls)

    def __len__(self) -> int:
        return len(self.frame)

    @classmethod
    def from_csv(cls, path, controls: tuple = DEFAULT_CONTROLS) -> "MacroPanel":
        frame = pd.read_csv(path, float_precision="round_trip")
        if "quarter" not in frame.columns:
            raise DomainError(f"{path}: first column must be 'quarter'")
        index = pd.PeriodIndex([parse_quarter(q) for q in frame["quarter"]], freq="Q")
        frame = frame.drop(columns="quarter")
        frame.index = index
        return cls(frame=frame, controls=controls)

    def to_csv(self, path) -> None:
        out = self.frame.copy()
        out.insert(0, "quarter", out.index.astype(str))
        out.to_csv(path, index=False)


@dataclass
class LpDesign:
    """Design of one per-horizon regression.

    ``response[i] = Y[t_i + h] - Y[t_i]`` and ``matrix`` rows follow the fixed
    column order ``const, shock, <controls lagged one quarter>, trend,
    d_covid``. Rows exist only for quarters with both the lagged controls and
    the led outcome inside the sample.
    """

    response: np.ndarray
    matrix: np.ndarray
    columns: list
    quarters: pd.PeriodIndex
    horizon: int
    dep_var: str

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def k(self) -> int:
        return self.matrix.shape[1]


@dataclass
class OlsFit:
    coefficients: np.ndarray
    residuals: np.ndarray
    fitted: np.ndarray


@dataclass
class IrfResult:
    """Impulse response of one dependent variable across horizons."""

    dep_var: str
    horizon: np.ndarray
    beta: np.ndarray
    se: np.ndarray
    pvalue: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    n: np.ndarray
    confidence_level: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "horizon": self.horizon,
                "beta": self.beta,
                "se": self.se,
                "pvalue": self.pvalue,
                "ci_lo": self.ci_lo,
                "ci_hi": self.ci_hi,
                "n": self.n,
            }
        )

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path, dep_var: str, confidence_level: float = 0.95) -> "IrfResult":
        frame = pd.read_csv(path, float_precision="round_trip")
        return cls(
            dep_var=dep_var,
            horizon=frame["horizon"].to_numpy(dtype=int),
            beta=frame["beta"].to_numpy(dtype=float),
            se=frame["se"].to_numpy(dtype=float),
            pvalue=frame["pvalue"].to_numpy(dtype=float),
            ci_lo=frame["ci_lo"].to_numpy(dtype=float),
            ci_hi=frame["ci_hi"].to_numpy(dtype=float),
            n=frame["n"].to_numpy(dtype=int),
            confidence_level=confidence_level,
        )


def build_lp_dataset(
    panel: MacroPanel,
    shocks: ShockSeries,
    dep_var: str,
    h: int,
    controls: tuple | None = None,
) -> LpDesign:
    """Assemble the horizon-h regression for ``dep_var``.

    Usable quarters are those with the previous quarter (for lagged controls)
    and the h-quarters-ahead outcome both inside the panel; rows are dropped
    symmetrically from response and regressors. The linear trend equals 1 on
    the first panel quarter and increases by one per quarter.
    """
    if h < 1:
        raise DomainError(f"horizon must be >= 1, got {h}")
    if dep_var not in panel.frame.columns:
        raise DomainError(f"dependent variable {dep_var!r} not in panel")
    if dep_var in panel.controls:
        raise DomainError(f"{dep_var!r} is a control, not a dependent variable")
    controls = panel.controls if controls is None else tuple(controls)

    quarters = panel.quarters
    n_total = len(quarters)
    usable = np.arange(1, n_total - h)  # positions with t-1 and t+h in range
    columns = ["const", "shock", *[f"{c}_lag1" for c in controls], "trend", "d_covid"]
    if usable.size < len(columns):
        raise InsufficientDataError(
            f"horizon {h}: {usable.size} usable rows cannot support {len(columns)} regressors"
        )

    y = panel.frame[dep_var].to_numpy()
    response = y[usable + h] - y[usable]
    t_quarters = quarters[usable]

    shock_vals = np.array([shocks.value_at(q) for q in t_quarters])
    control_block = panel.frame.loc[quarters[usable - 1], list(controls)].to_numpy()
    trend = usable.astype(float) + 1.0  # first sample quarter has trend 1
    covid = np.array([covid_dummy(q) for q in t_quarters])

    matrix = np.column_stack(
        [np.ones(usable.size), shock_vals, control_block, trend, covid]
    )
    return LpDesign(
        response=response,
        matrix=matrix,
        columns=columns,
        quarters=t_quarters,
        horizon=h,
        dep_var=dep_var,
    )


def _drop_unsupported_dummy(design: LpDesign) -> LpDesign:
    """Drop the pandemic dummy when the usable window gives it no support.

    At long horizons every usable quarter can predate the pandemic, leaving
    the dummy identically zero; fitting would be spuriously singular, so the
    column is removed for that horizon only. Any other rank deficiency still
    surfaces as :class:`SingularDesignError`.
    """
    if "d_covid" not in design.columns:
        return design
    j = design.columns.index("d_covid")
    if np.any(design.matrix[:, j] != 0.0):
        return design
    keep = [i for i in range(design.k) if i != j]
    return LpDesign(
        response=design.response,
        matrix=design.matrix[:, keep],
        columns=[design.columns[i] for i in keep],
        quarters=design.quarters,
        horizon=design.horizon,
        dep_var=design.dep_var,
    )


def _collinear_columns(matrix: np.ndarray, columns, rank: int) -> list:
    """Name columns responsible for rank deficiency via pivoted QR."""
    from scipy.linalg import qr

    _, r, piv = qr(matrix, mode="economic", pivoting=True)
    return sorted(columns[j] for j in piv[rank:])


def ols(design: LpDesign) -> OlsFit:
    """Least-squares fit of the design; requires full column rank.

    Residuals are orthogonal to every regressor column up to numerical
    round-off. Rank deficiency raises :class:`SingularDesignError` naming the
    collinear columns.
    """
    x, y = design.matrix, design.response
    rank = np.linalg.matrix_rank(x)
    if rank < design.k:
        bad = _collinear_columns(x, design.columns, rank)
        raise SingularDesignError(
            f"design for {design.dep_var!r} at horizon {design.horizon} is rank deficient "
            f"({rank} < {design.k}); collinear column(s): {bad}",
            columns=bad,
        )
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    fitted = x @ coef
    return OlsFit(coefficients=coef, residuals=y - fitted, fitted=fitted)


def newey_west_cov(design: LpDesign, residuals: np.ndarray, lag: int) -> np.ndarray:
    """Bartlett-kernel HAC sandwich covariance of the OLS coefficients.

    ``S = Gamma_0 + sum_{l=1..lag} (1 - l/(lag+1)) (Gamma_l + Gamma_l')`` with
    ``Gamma_l = sum_t x_t e_t e_{t-l} x_{t-l}'``, wrapped in
    ``(X'X)^{-1} S (X'X)^{-1}``. The result is symmetrized; it is positive
    semidefinite by construction of the kernel weights.
    """
    x = design.matrix
    e = np.asarray(residuals, dtype=float)
    n = x.shape[0]
    if e.shape != (n,):
        raise DomainError(f"residuals must have shape ({n},), got {e.shape}")
    if lag < 0:
        raise DomainError(f"HAC lag must be >= 0, got {lag}")
    if lag >= n:
        raise DomainError(f"HAC lag {lag} must be smaller than the sample size {n}")
    xe = x * e[:, None]
    s = xe.T @ xe
    for l in range(1, lag + 1):
        w = 1.0 - l / (lag + 1.0)
        gamma = xe[l:].T @ xe[:-l]
        s += w * (gamma + gamma.T)
    xtx_inv = np.linalg.inv(x.T @ x)
    cov = xtx_inv @ s @ xtx_inv
    return 0.5 * (cov + cov.T)


def estimate_irf(
    panel: MacroPanel,
    shocks: ShockSeries,
    dep_var: str,
    horizons,
    hac_lag: int | None = None,
    confidence_level: float = 0.95,
    use_t_dist: bool = False,
    df_correction: bool = False,
    controls: tuple | None = None,
) -> IrfResult:
    """Impulse response of ``dep_var`` over the requested horizons.

    ``horizons`` is either the maximum horizon (estimating 1..H) or an
    iterable of horizons. The HAC bandwidth defaults to ``h + 1`` per horizon
    (capped at n-1), or a fixed ``hac_lag`` when given. P-values and
    confidence bounds use the normal approximation unless ``use_t_dist``
    switches to Student-t critical values with n-k degrees of freedom;
    ``df_correction`` additionally scales standard errors by
    ``sqrt(n / (n - k))`` for small samples. Horizons whose usable sample is
    too small are omitted from the result.
    """
    if dep_var not in panel.frame.columns:
        raise DomainError(f"dependent variable {dep_var!r} not in panel")
    if not 0.0 < confidence_level < 1.0:
        raise DomainError(f"confidence level must lie in (0, 1), got {confidence_level}")
    if isinstance(horizons, int):
        if horizons < 1:
            raise DomainError(f"max horizon must be >= 1, got {horizons}")
        horizons = range(1, horizons + 1)
    horizons = sorted(set(int(h) for h in horizons))

    rows = []
    for h in horizons:
        try:
            design = build_lp_dataset(panel, shocks, dep_var, h, controls=controls)
        except InsufficientDataError:
            continue
        design = _drop_unsupported_dummy(design)
        fit = ols(design)
        lag = (h + 1) if hac_lag is None else int(hac_lag)
        lag = min(lag, design.n - 1)
        cov = newey_west_cov(design, fit.residuals, lag)
        beta = float(fit.coefficients[_SHOCK_COL])
        se = float(np.sqrt(max(cov[_SHOCK_COL, _SHOCK_COL], 0.0)))
        if df_correction:
            se *= float(np.sqrt(design.n / (design.n - design.k)))
        tstat = beta / se if se > 0 else np.inf * np.sign(beta or 1.0)
        if use_t_dist:
            df = design.n - design.k
            pvalue = 2.0 * float(sps.t.sf(abs(tstat), df))
            crit = float(sps.t.ppf(0.5 + confidence_level / 2.0, df))
        else:
            pvalue = 2.0 * (1.0 - NormalDist().cdf(abs(tstat)))
            crit = NormalDist().inv_cdf(0.5 + confidence_level / 2.0)
        rows.append((h, beta, se, pvalue, beta - crit * se, beta + crit * se, design.n))

    if not rows:
        raise InsufficientDataError(
            f"no horizon in {list(horizons)} leaves enough usable rows for {dep_var!r}"
        )
    arr = np.array(rows, dtype=float)
    return IrfResult(
        dep_var=dep_var,
        horizon=arr[:, 0].astype(int),
        beta=arr[:, 1],
        se=arr[:, 2],
        pvalue=arr[:, 3],
        ci_lo=arr[:, 4],
        ci_hi=arr[:, 5],
        n=arr[:, 6].astype(int),
        confidence_level=confidence_level,
    )


def significance_table(
    results,
    strong: float = 0.01,
    weak: float = 0.10,
    fmt: str = "{:.4f}",
):
    """Horizon-by-variable significance report.

    Cells show the coefficient in ``**bold**`` when ``p < strong``, plain when
    ``p < weak``, and ``--`` otherwise. Returns ``(text, frame)`` where
    ``frame`` is the long-form CSV payload with a ``significance`` marker
    column.
    """
    if isinstance(results, dict):
        results = list(results.values())
    all_h = sorted({int(h) for r in results for h in r.horizon})

    records = []
    cells = {}
    for r in results:
        by_h = {int(h): i for i, h in enumerate(r.horizon)}
        for h in all_h:
            if h not in by_h:
                cells[(r.dep_var, h)] = "--"
                continue
            i = by_h[h]
            beta, p = r.beta[i], r.pvalue[i]
            if p < strong:
                cell, marker = f"**{fmt.format(beta)}**", f"p<{strong:g}"
            elif p < weak:
                cell, marker = fmt.format(beta), f"p<{weak:g}"
            else:
                cell, marker = "--", ""
            cells[(r.dep_var, h)] = cell
            records.append(
                {
                    "dep_var": r.dep_var,
                    "horizon": h,
                    "beta": beta,
                    "se": r.se[i],
                    "pvalue": p,
                    "significance": marker,
                }
            )

    name_width = max(len("variable"), *(len(r.dep_var) for r in results))
    col_width = max(6, *(len(c) for c in cells.values())) if cells else 6
    header = "variable".ljust(name_width) + "".join(
        f"  {('h=' + str(h)).rjust(col_width)}" for h in all_h
    )
    lines = [header, "-" * len(header)]
    for r in results:
        row = r.dep_var.ljust(name_width) + "".join(
            f"  {cells[(r.dep_var, h)].rjust(col_width)}" for h in all_h
        )
        lines.append(row)
    lines.append("")
    lines.append(f"**x** marks p < {strong:g}; plain entries p < {weak:g}; -- otherwise.")
    frame = pd.DataFrame.from_records(
        records, columns=["dep_var", "horizon", "beta", "se", "pvalue", "significance"]
    )
    return "\n".join(lines), frame
