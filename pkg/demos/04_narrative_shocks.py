"""Build the high-frequency narrative shock from minute bars.

Generates the three synthetic index sessions around the announcement date,
computes each opening-gap component, aggregates them with equal weights, and
lays the result onto the quarterly calendar with reinforcement pulses.
"""

from pathlib import Path

from ncc import MinuteBarSeries, build_quarterly_shock_series, equal_weight_shock, opening_gap_shock
from ncc.fixtures import write_market_fixtures

OUT = Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    bars_dir = OUT / "market"
    components = write_market_fixtures(bars_dir)
    print(f"wrote synthetic minute bars to {bars_dir}")

    values = []
    print("\nopening-gap components (MA window k=10):")
    for comp in components:
        pre = MinuteBarSeries.from_csv(comp["preclose"], label=f"{comp['name']} pre-close")
        post = MinuteBarSeries.from_csv(comp["postopen"], label=f"{comp['name']} post-open")
        shock = opening_gap_shock(pre, post, k=10)
        values.append(shock)
        print(f"  {comp['name']:8s}: {shock:+.6f}  ({shock * 100:.4f}%)")

    aggregate = equal_weight_shock(values)
    print(f"\nequal-weight aggregate: {aggregate:.7f}  -> {aggregate * 100:.3f}%")

    series = build_quarterly_shock_series(
        aggregate,
        base_quarter="2016Q2",
        reinforcements=[("2017Q4", 0.0001), ("2022Q4", 0.0001)],
        start="2016Q1",
        end="2023Q4",
    )
    nonzero = series.data[series.data != 0]
    print("\nquarterly shock series (nonzero entries):")
    for quarter, value in nonzero.items():
        print(f"  {quarter}: {value:.7f}")
    series.to_csv(OUT / "shock_series.csv")
    print(f"\nwrote {OUT / 'shock_series.csv'}")


if __name__ == "__main__":
    main()
