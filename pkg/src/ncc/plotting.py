"""Deterministic SVG rendering of impulse-response results.

The document is assembled from fixed-format strings (no plotting backend), so
identical inputs produce byte-identical output. The numeric payload is
embedded verbatim in a ``<desc id="irf-data">`` block as CSV, allowing
round-trip extraction from the rendered file.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .errors import DomainError
from .localproj import IrfResult

__all__ = ["render_irf_plot", "extract_irf_data"]

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 56.0, 16.0, 34.0, 42.0


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_irf_plot(
    result: IrfResult,
    path=None,
    width: int = 640,
    height: int = 400,
    title: str | None = None,
    band_color: str = "#9ecae1",
    line_color: str = "#08519c",
) -> str:
    """Render beta over horizon with its confidence band and a zero line.

    A single-horizon result renders one marker with a vertical interval
    instead of a connected line. Returns the SVG text; also writes it to
    ``path`` when given.
    """
    if result.horizon.size == 0:
        raise DomainError("cannot render an empty impulse-response result")
    h = np.asarray(result.horizon, dtype=float)
    beta, lo, hi = result.beta, result.ci_lo, result.ci_hi

    x0, x1 = float(h.min()), float(h.max())
    if x0 == x1:
        x0, x1 = x0 - 0.5, x1 + 0.5
    y0 = min(float(lo.min()), 0.0)
    y1 = max(float(hi.max()), 0.0)
    pad = 0.05 * (y1 - y0) or 1.0
    y0, y1 = y0 - pad, y1 + pad

    inner_w = width - _MARGIN_L - _MARGIN_R
    inner_h = height - _MARGIN_T - _MARGIN_B

    def sx(v):
        return _MARGIN_L + (v - x0) / (x1 - x0) * inner_w

    def sy(v):
        return _MARGIN_T + (y1 - v) / (y1 - y0) * inner_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
    ]
    data_lines = ["horizon,beta,se,pvalue,ci_lo,ci_hi,n"]
    for i in range(result.horizon.size):
        data_lines.append(
            f"{int(result.horizon[i])},{float(result.beta[i])!r},{float(result.se[i])!r},"
            f"{float(result.pvalue[i])!r},{float(result.ci_lo[i])!r},"
            f"{float(result.ci_hi[i])!r},{int(result.n[i])}"
        )
    parts.append("<desc id=\"irf-data\">\n" + "\n".join(data_lines) + "\n</desc>")

    parts.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    parts.append(
        f'<rect x="{_fmt(_MARGIN_L)}" y="{_fmt(_MARGIN_T)}" width="{_fmt(inner_w)}" '
        f'height="{_fmt(inner_h)}" fill="none" stroke="#444444" stroke-width="1"/>'
    )

    label = escape(title if title is not None else f"impulse response: {result.dep_var}")
    parts.append(
        f'<text x="{_fmt(width / 2)}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{label}</text>'
    )

    if result.horizon.size > 1:
        band = (
            " ".join(f"{_fmt(sx(hv))},{_fmt(sy(v))}" for hv, v in zip(h, hi))
            + " "
            + " ".join(f"{_fmt(sx(hv))},{_fmt(sy(v))}" for hv, v in zip(h[::-1], lo[::-1]))
        )
        parts.append(f'<polygon points="{band}" fill="{band_color}" fill-opacity="0.55"/>')
    else:
        parts.append(
            f'<line x1="{_fmt(sx(h[0]))}" y1="{_fmt(sy(lo[0]))}" x2="{_fmt(sx(h[0]))}" '
            f'y2="{_fmt(sy(hi[0]))}" stroke="{band_color}" stroke-width="3"/>'
        )

    zero_y = _fmt(sy(0.0))
    parts.append(
        f'<line x1="{_fmt(_MARGIN_L)}" y1="{zero_y}" x2="{_fmt(width - _MARGIN_R)}" '
        f'y2="{zero_y}" stroke="#888888" stroke-width="1" stroke-dasharray="4 3"/>'
    )

    if result.horizon.size > 1:
        pts = " ".join(f"{_fmt(sx(hv))},{_fmt(sy(v))}" for hv, v in zip(h, beta))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{line_color}" stroke-width="1.8"/>'
        )
    for hv, v in zip(h, beta):
        parts.append(
            f'<circle cx="{_fmt(sx(hv))}" cy="{_fmt(sy(v))}" r="2.6" fill="{line_color}"/>'
        )

    for hv in _ticks(x0, x1, 8, integer=True):
        parts.append(
            f'<line x1="{_fmt(sx(hv))}" y1="{_fmt(height - _MARGIN_B)}" x2="{_fmt(sx(hv))}" '
            f'y2="{_fmt(height - _MARGIN_B + 4)}" stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(sx(hv))}" y="{_fmt(height - _MARGIN_B + 17)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{int(hv)}</text>'
        )
    for yv in _ticks(y0, y1, 6):
        parts.append(
            f'<line x1="{_fmt(_MARGIN_L - 4)}" y1="{_fmt(sy(yv))}" x2="{_fmt(_MARGIN_L)}" '
            f'y2="{_fmt(sy(yv))}" stroke="#444444" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_MARGIN_L - 7)}" y="{_fmt(sy(yv) + 3.5)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{yv:.4g}</text>'
        )
    parts.append(
        f'<text x="{_fmt(_MARGIN_L + inner_w / 2)}" y="{_fmt(height - 8)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">horizon (quarters)</text>'
    )

    parts.append("</svg>")
    doc = "\n".join(parts) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(doc)
    return doc


def _ticks(lo: float, hi: float, target: int, integer: bool = False):
    """A few round tick positions inside [lo, hi]."""
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / max(target, 1)
    mag = 10.0 ** np.floor(np.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if span / step <= target:
            break
    if integer:
        step = max(1.0, round(step))
    first = np.ceil(lo / step) * step
    ticks = np.arange(first, hi + 1e-9 * span, step)
    return [float(t) for t in ticks]


def extract_irf_data(svg_text: str) -> list:
    """Parse the embedded data block back out of a rendered document.

    Returns a list of dicts keyed by the CSV header. Raises if the document
    is not well-formed XML or carries no data block.
    """
    import xml.etree.ElementTree as ET

    root = ET.fromstring(svg_text)
    ns = {"svg": "http://www.w3.org/2000/svg"}
    desc = root.find("svg:desc[@id='irf-data']", ns)
    if desc is None or not desc.text:
        raise DomainError("document carries no irf-data block")
    lines = [ln for ln in desc.text.strip().splitlines() if ln]
    header = lines[0].split(",")
    rows = []
    for line in lines[1:]:
        values = line.split(",")
        rows.append({k: float(v) for k, v in zip(header, values)})
    return rows
