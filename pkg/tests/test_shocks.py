"""Opening-gap shock, equal-weight aggregation, and quarterly series tests."""

import numpy as np
import pandas as pd
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncc import (
    DomainError,
    InsufficientDataError,
    MinuteBarSeries,
    ShockSeries,
    build_quarterly_shock_series,
    equal_weight_shock,
    opening_gap_shock,
)
from ncc.fixtures import COMPONENT_GAPS, make_minute_bars
from ncc.shocks import parse_quarter, quarter_range


def bars(prices, start="2016-05-19T14:30", label=""):
    stamps = np.datetime64(start) + np.arange(len(prices))
    return MinuteBarSeries(stamps, np.asarray(prices, dtype=float), label=label)


# --- minute bars ---------------------------------------------------------------


def test_minute_bars_validation():
    with pytest.raises(DomainError, match="strictly increasing"):
        MinuteBarSeries(
            np.array(["2016-05-19T14:30", "2016-05-19T14:30"], dtype="datetime64[m]"),
            np.array([1.0, 2.0]),
        )
    with pytest.raises(DomainError, match="> 0"):
        bars([100.0, -1.0])
    with pytest.raises(DomainError, match="empty"):
        bars([])


def test_minute_bars_csv_round_trip(tmp_path):
    series = bars([100.0, 100.5, 99.75], label="demo")
    path = tmp_path / "demo.csv"
    series.to_csv(path)
    text = path.read_text().splitlines()
    assert text[0] == "timestamp,price"
    loaded = MinuteBarSeries.from_csv(path, label="demo")
    assert np.array_equal(loaded.prices, series.prices)
    assert np.array_equal(loaded.timestamps, series.timestamps)


def test_minute_bars_csv_rejects_wrong_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,px\n2016-05-19T14:30,100\n")
    with pytest.raises(DomainError, match="expected columns"):
        MinuteBarSeries.from_csv(path)


# --- opening gap -----------------------------------------------------------------


def test_opening_gap_window_means():
    # last-3 pre mean 100, first-3 post mean 101
    pre = bars([90.0, 95.0, 99.0, 100.0, 101.0])
    post = bars([101.5, 101.0, 100.5, 120.0], start="2016-05-20T09:30")
    got = opening_gap_shock(pre, post, k=3)
    assert got == pytest.approx(0.01, rel=1e-12)


def test_opening_gap_constant_price_is_zero():
    pre = bars([100.0] * 12)
    post = bars([100.0] * 12, start="2016-05-20T09:30")
    assert opening_gap_shock(pre, post, k=10) == 0.0


def test_opening_gap_k1_degenerates_to_simple_return():
    pre = bars([98.0, 99.0, 104.0])
    post = bars([101.0, 93.0], start="2016-05-20T09:30")
    assert opening_gap_shock(pre, post, k=1) == pytest.approx((101.0 - 104.0) / 104.0)


def test_opening_gap_insufficient_bars_names_session():
    pre = bars([100.0] * 4, label="csi300 pre-close")
    post = bars([100.0] * 12, start="2016-05-20T09:30")
    with pytest.raises(InsufficientDataError, match="pre-close.*csi300"):
        opening_gap_shock(pre, post, k=10)
    with pytest.raises(InsufficientDataError, match="post-open"):
        opening_gap_shock(post, pre, k=10)
    with pytest.raises(DomainError):
        opening_gap_shock(pre, post, k=0)


@settings(deadline=None)
@given(scale=st.floats(0.01, 1e4))
def test_opening_gap_scale_equivariance(scale):
    pre_prices = np.array([100.0, 101.0, 99.5, 100.25, 100.75])
    post_prices = np.array([101.0, 101.5, 100.5, 99.0])
    base = opening_gap_shock(bars(pre_prices), bars(post_prices, start="2016-05-20T09:30"), k=3)
    scaled = opening_gap_shock(
        bars(scale * pre_prices), bars(scale * post_prices, start="2016-05-20T09:30"), k=3
    )
    assert scaled == pytest.approx(base, rel=1e-12)


def test_fixture_gaps_reproduce_component_magnitudes():
    for name, gap in COMPONENT_GAPS.items():
        pre, post = make_minute_bars(name, gap, 3000.0)
        got = opening_gap_shock(pre, post, k=10)
        assert got == pytest.approx(gap, abs=1e-12)


# --- equal-weight aggregation -----------------------------------------------------


def test_equal_weight_reproduces_aggregate_index():
    agg = equal_weight_shock([0.001721, 0.002463, 0.000435])
    assert round(agg * 100, 3) == 0.154


def test_equal_weight_basics():
    assert equal_weight_shock([0.42]) == 0.42
    assert equal_weight_shock([0.3, -0.3]) == 0.0
    assert equal_weight_shock([0.3, -0.4], absolute=True) == pytest.approx(0.35)
    with pytest.raises(DomainError):
        equal_weight_shock([])
    with pytest.raises(DomainError):
        equal_weight_shock([0.1, np.nan])


@settings(deadline=None)
@given(st.lists(st.floats(-0.05, 0.05), min_size=1, max_size=8))
def test_equal_weight_permutation_invariant_and_bounded(values):
    agg = equal_weight_shock(values)
    assert equal_weight_shock(values[::-1]) == pytest.approx(agg, rel=1e-12, abs=1e-15)
    assert min(values) - 1e-15 <= agg <= max(values) + 1e-15


# --- quarterly series ---------------------------------------------------------------


def test_build_series_three_nonzero_entries():
    series = build_quarterly_shock_series(
        0.0015397, "2016Q2", [("2017Q4", 0.0001), ("2022Q4", 0.0001)], "2016Q1", "2023Q4"
    )
    assert len(series.data) == 32
    assert int((series.data != 0).sum()) == 3
    assert series.value_at("2016Q2") == 0.0015397
    assert series.value_at("2017Q4") == 0.0001
    assert series.value_at("2019Q1") == 0.0
    assert series.data.sum() == pytest.approx(0.0015397 + 0.0002, abs=1e-15)


def test_build_series_no_reinforcements():
    series = build_quarterly_shock_series(0.002, "2017Q1", [], "2016Q1", "2018Q4")
    assert int((series.data != 0).sum()) == 1


def test_build_series_coincident_reinforcement_adds():
    series = build_quarterly_shock_series(0.002, "2017Q1", [("2017Q1", 0.0001)], "2016Q1", "2018Q4")
    assert series.value_at("2017Q1") == pytest.approx(0.0021, abs=1e-15)


def test_build_series_rejects_out_of_range():
    with pytest.raises(DomainError, match="outside range"):
        build_quarterly_shock_series(0.01, "2015Q4", [], "2016Q1", "2018Q4")
    with pytest.raises(DomainError, match="outside range"):
        build_quarterly_shock_series(0.01, "2016Q2", [("2024Q1", 0.1)], "2016Q1", "2018Q4")


def test_series_csv_round_trip_lossless(tmp_path):
    values = [0.0015396666666666667, -3.1e-17, 0.25, 0.0, 1e-300]
    index = quarter_range("2016Q1", "2017Q1")
    series = ShockSeries(data=pd.Series(values, index=index))
    path = tmp_path / "shock.csv"
    series.to_csv(path)
    text = path.read_text().splitlines()
    assert text[0] == "quarter,shock"
    assert text[1].startswith("2016Q1,")
    loaded = ShockSeries.from_csv(path)
    assert np.array_equal(loaded.data.to_numpy(), series.data.to_numpy())
    assert loaded.data.index.equals(series.data.index)


def test_series_requires_contiguity():
    idx = pd.PeriodIndex(["2016Q1", "2016Q3"], freq="Q")
    with pytest.raises(DomainError, match="contiguous"):
        ShockSeries(data=pd.Series([0.1, 0.2], index=idx))


def test_quarter_parsing():
    assert str(parse_quarter("2016Q2")) == "2016Q2"
    assert parse_quarter("2016Q2") < parse_quarter("2016Q3")
    with pytest.raises(DomainError):
        parse_quarter("not-a-quarter")
    with pytest.raises(DomainError):
        quarter_range("2020Q1", "2019Q1")
    assert len(quarter_range("2016Q1", "2023Q4")) == 32
