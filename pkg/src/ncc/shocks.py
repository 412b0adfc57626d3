"""High-frequency narrative-shock construction and the quarterly shock regressor.

A narrative shock is the relative gap between the mean price of the first k
minute bars after the market reopens following a policy announcement and the
mean price of the last k bars before the preceding close. Component shocks
from several indices are averaged with equal weights, and the result is
placed on a quarterly calendar together with optional reinforcement pulses.

Shock values are stored as raw return fractions throughout; rendering as
percent happens only in reports.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .errors import DomainError, InsufficientDataError

__all__ = [
    "MinuteBarSeries",
    "ShockSeries",
    "opening_gap_shock",
    "equal_weight_shock",
    "build_quarterly_shock_series",
    "parse_quarter",
    "quarter_range",
]


def parse_quarter(text) -> pd.Period:
    """Parse 'YYYYQn' into a quarterly period."""
    if isinstance(text, pd.Period):
        if text.freqstr.startswith("Q"):
            return text
        raise DomainError(f"period {text} is not quarterly")
    try:
        period = pd.Period(str(text), freq="Q")
    except Exception as exc:
        raise DomainError(f"cannot parse quarter {text!r}: {exc}") from None
    return period


def quarter_range(start, end) -> pd.PeriodIndex:
    """Inclusive contiguous quarter index from start to end."""
    start, end = parse_quarter(start), parse_quarter(end)
    if end < start:
        raise DomainError(f"quarter range end {end} precedes start {start}")
    return pd.period_range(start, end, freq="Q")


@dataclass
class MinuteBarSeries:
    """Minute-resolution price bars for one trading session.

    Timestamps must be strictly increasing and prices strictly positive.
    ``label`` identifies the session in error messages (e.g.
    ``'csi300 pre-close'``).
    """

    timestamps: np.ndarray
    prices: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[m]")
        self.prices = np.asarray(self.prices, dtype=float)
        name = self.label or "minute-bar series"
        if self.timestamps.shape != self.prices.shape or self.timestamps.ndim != 1:
            raise DomainError(f"{name}: timestamps and prices must be equal-length 1-d arrays")
        if self.prices.size == 0:
            raise DomainError(f"{name}: series is empty")
        if not np.isfinite(self.prices).all() or (self.prices <= 0).any():
            raise DomainError(f"{name}: prices must be finite and > 0")
        if (np.diff(self.timestamps) <= np.timedelta64(0, "m")).any():
            raise DomainError(f"{name}: timestamps must be strictly increasing")

    def __len__(self) -> int:
        return self.prices.size

    @classmethod
    def from_csv(cls, path, label: str = "") -> "MinuteBarSeries":
        """Read a ``timestamp,price`` CSV with ISO-8601 minute timestamps."""
        frame = pd.read_csv(path, float_precision="round_trip")
        expected = ["timestamp", "price"]
        if list(frame.columns) != expected:
            raise DomainError(
                f"{path}: expected columns {expected}, found {list(frame.columns)}"
            )
        stamps = pd.to_datetime(frame["timestamp"]).to_numpy(dtype="datetime64[m]")
        return cls(timestamps=stamps, prices=frame["price"].to_numpy(), label=label or str(path))

    def to_csv(self, path) -> None:
        out = pd.DataFrame(
            {
                "timestamp": np.datetime_as_string(self.timestamps, unit="m"),
                "price": self.prices,
            }
        )
        out.to_csv(path, index=False)


def opening_gap_shock(
    pre_close: MinuteBarSeries, post_open: MinuteBarSeries, k: int = 10
) -> float:
    """Relative gap between post-open and pre-close window means.

    The window mean is the arithmetic mean of the last ``k`` pre-close bars
    (respectively the first ``k`` post-open bars). ``k=1`` degenerates to the
    simple last-price/first-price return.
    """
    if k < 1:
        raise DomainError(f"window size k must be >= 1, got {k}")
    for series, side in ((pre_close, "pre-close"), (post_open, "post-open")):
        if len(series) < k:
            name = series.label or side
            raise InsufficientDataError(
                f"{side} session {name!r} holds {len(series)} bars, need >= {k}"
            )
    pre_mean = float(np.mean(pre_close.prices[-k:]))
    post_mean = float(np.mean(post_open.prices[:k]))
    return (post_mean - pre_mean) / pre_mean


def equal_weight_shock(components, absolute: bool = False) -> float:
    """Equal-weight average of component shocks.

    ``absolute=True`` averages magnitudes instead of signed values (the signed
    average is the default).
    """
    values = np.asarray(list(components), dtype=float)
    if values.size == 0:
        raise DomainError("cannot aggregate an empty set of component shocks")
    if not np.isfinite(values).all():
        raise DomainError("component shocks must be finite")
    if absolute:
        values = np.abs(values)
    return float(values.mean())


@dataclass
class ShockSeries:
    """Quarterly shock regressor over a contiguous quarter range."""

    data: pd.Series
    base_quarter: pd.Period | None = field(default=None)

    def __post_init__(self):
        if not isinstance(self.data.index, pd.PeriodIndex):
            raise DomainError("ShockSeries index must be a quarterly PeriodIndex")
        idx = self.data.index
        if len(idx) == 0:
            raise DomainError("ShockSeries covers no quarters")
        expected = pd.period_range(idx[0], idx[-1], freq="Q")
        if not idx.equals(expected):
            raise DomainError("ShockSeries quarters must be contiguous and sorted")
        self.data = self.data.astype(float)
        self.data.name = "shock"
        if self.base_quarter is not None:
            self.base_quarter = parse_quarter(self.base_quarter)

    @property
    def start(self) -> pd.Period:
        return self.data.index[0]

    @property
    def end(self) -> pd.Period:
        return self.data.index[-1]

    def value_at(self, quarter) -> float:
        quarter = parse_quarter(quarter)
        if quarter not in self.data.index:
            raise DomainError(f"quarter {quarter} outside shock series range")
        return float(self.data.loc[quarter])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"quarter": self.data.index.astype(str), "shock": self.data.to_numpy()}
        )

    def to_csv(self, path) -> None:
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path) -> "ShockSeries":
        frame = pd.read_csv(path, float_precision="round_trip")
        expected = ["quarter", "shock"]
        if list(frame.columns) != expected:
            raise DomainError(f"{path}: expected columns {expected}, found {list(frame.columns)}")
        index = pd.PeriodIndex([parse_quarter(q) for q in frame["quarter"]], freq="Q")
        return cls(data=pd.Series(frame["shock"].to_numpy(), index=index, name="shock"))


def build_quarterly_shock_series(
    base_shock: float,
    base_quarter,
    reinforcements,
    start,
    end,
) -> ShockSeries:
    """Place the base shock and reinforcement pulses on a quarterly calendar.

    The series is zero everywhere except the base-event quarter and each
    reinforcement quarter; a reinforcement landing on the base quarter adds to
    it. Quarters outside [start, end] are rejected.
    """
    index = quarter_range(start, end)
    base_quarter = parse_quarter(base_quarter)
    if base_quarter not in index:
        raise DomainError(f"base quarter {base_quarter} outside range {index[0]}..{index[-1]}")
    values = pd.Series(np.zeros(len(index)), index=index, name="shock")
    values.loc[base_quarter] = float(base_shock)
    for quarter, value in reinforcements:
        quarter = parse_quarter(quarter)
        if quarter not in index:
            raise DomainError(
                f"reinforcement quarter {quarter} outside range {index[0]}..{index[-1]}"
            )
        values.loc[quarter] += float(value)
    return ShockSeries(data=values, base_quarter=base_quarter)
