"""Trace the shock through macro outcomes with per-horizon projections.

Uses the synthetic quarterly panel, estimates the impulse response of each
dependent variable with HAC standard errors, prints the significance table,
and renders one confidence-band chart per variable.
"""

from pathlib import Path

from ncc import estimate_irf, render_irf_plot, significance_table
from ncc.fixtures import make_macro_panel
from ncc.shocks import build_quarterly_shock_series

OUT = Path(__file__).parent / "output"


def main():
    OUT.mkdir(exist_ok=True)
    panel = make_macro_panel()
    shocks = build_quarterly_shock_series(
        0.0015397, "2016Q2", [("2017Q4", 0.0001), ("2022Q4", 0.0001)], "2016Q1", "2023Q4"
    )
    print(f"panel: {len(panel)} quarters, dependent variables: {', '.join(panel.dep_vars)}")

    results = []
    for var in panel.dep_vars:
        result = estimate_irf(panel, shocks, var, horizons=12)
        results.append(result)
        peak = max(range(len(result.horizon)), key=lambda i: abs(result.beta[i]))
        print(f"  {var:28s} h=1..{result.horizon.max()}  "
              f"largest response {result.beta[peak]:+.3f} at h={result.horizon[peak]} "
              f"(p={result.pvalue[peak]:.3f})")
        result.to_csv(OUT / f"irf_{var}.csv")
        render_irf_plot(result, path=OUT / f"irf_{var}.svg")

    text, frame = significance_table(results)
    print("\n" + text)
    (OUT / "significance.txt").write_text(text + "\n")
    frame.to_csv(OUT / "significance.csv", index=False)
    print(f"\nwrote per-variable CSV/SVG files and the significance table to {OUT}")


if __name__ == "__main__":
    main()
