"""Minimal self-contained SVG line charts for protocol reports.

No plotting dependency: the charts here are simple enough (one series,
numeric axes) that emitting the SVG by hand keeps output byte-stable across
environments, which the determinism contract needs.
"""

from __future__ import annotations

from pathlib import Path

from .errors import DataError
from .protocols import ConvergenceReport, RateCurve, SweepResult

__all__ = ["render_line_chart", "emit_plot"]

_W, _H = 640, 400
_MARGIN = {"left": 62, "right": 18, "top": 34, "bottom": 46}


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _scale(values, lo_px, hi_px):
    vmin = min(values)
    vmax = max(values)
    if vmax == vmin:
        # degenerate span: park everything mid-axis
        pad = abs(vmin) if vmin else 1.0
        vmin, vmax = vmin - pad, vmax + pad
    span = vmax - vmin

    def to_px(v):
        return lo_px + (v - vmin) / span * (hi_px - lo_px)

    return to_px, vmin, vmax


def _ticks(vmin, vmax, count=5):
    step = (vmax - vmin) / (count - 1)
    return [vmin + i * step for i in range(count)]


def render_line_chart(xs, ys, title: str = "", x_label: str = "",
                      y_label: str = "") -> str:
    """One polyline (when >= 2 points) plus a circle marker per point."""
    xs = [float(v) for v in xs]
    ys = [float(v) for v in ys]
    if not xs or len(xs) != len(ys):
        raise DataError("chart needs equal-length nonempty xs and ys")
    x_px, xmin, xmax = _scale(xs, _MARGIN["left"], _W - _MARGIN["right"])
    # SVG y grows downward, flip the pixel range
    y_px, ymin, ymax = _scale(ys, _H - _MARGIN["bottom"], _MARGIN["top"])

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="20" text-anchor="middle" font-size="14">'
        f"{title}</text>",
    ]
    ax_l, ax_r = _MARGIN["left"], _W - _MARGIN["right"]
    ax_t, ax_b = _MARGIN["top"], _H - _MARGIN["bottom"]
    parts.append(
        f'<path d="M{ax_l} {ax_t} L{ax_l} {ax_b} L{ax_r} {ax_b}" '
        'fill="none" stroke="black"/>'
    )
    for tv in _ticks(xmin, xmax):
        px = x_px(tv)
        parts.append(f'<line x1="{_fmt(px)}" y1="{ax_b}" x2="{_fmt(px)}" '
                     f'y2="{ax_b + 5}" stroke="black"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{ax_b + 18}" '
                     f'text-anchor="middle">{_fmt(tv)}</text>')
    for tv in _ticks(ymin, ymax):
        py = y_px(tv)
        parts.append(f'<line x1="{ax_l - 5}" y1="{_fmt(py)}" x2="{ax_l}" '
                     f'y2="{_fmt(py)}" stroke="black"/>')
        parts.append(f'<text x="{ax_l - 8}" y="{_fmt(py + 4)}" '
                     f'text-anchor="end">{_fmt(tv)}</text>')
    if x_label:
        parts.append(f'<text x="{(ax_l + ax_r) / 2}" y="{_H - 8}" '
                     f'text-anchor="middle">{x_label}</text>')
    if y_label:
        parts.append(f'<text x="16" y="{(ax_t + ax_b) / 2}" text-anchor="middle" '
                     f'transform="rotate(-90 16 {(ax_t + ax_b) / 2})">{y_label}</text>')

    pts = [(x_px(x), y_px(y)) for x, y in zip(xs, ys)]
    if len(pts) >= 2:
        coords = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in pts)
        parts.append(f'<polyline class="series" points="{coords}" fill="none" '
                     'stroke="#1f77b4" stroke-width="1.5"/>')
    for px, py in pts:
        parts.append(f'<circle class="marker" cx="{_fmt(px)}" cy="{_fmt(py)}" '
                     'r="3" fill="#1f77b4"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plot(report, path) -> None:
    """Render a protocol report to a standalone SVG file."""
    if isinstance(report, ConvergenceReport):
        svg = render_line_chart(
            report.ns, report.means,
            title=f"{report.config.metric_id} vs sample size",
            x_label="n", y_label="mean value",
        )
    elif isinstance(report, RateCurve):
        svg = render_line_chart(
            report.ns, report.rates,
            title=f"{report.config.metric_id} relative deviation",
            x_label="n", y_label="rate",
        )
    elif isinstance(report, SweepResult):
        svg = render_line_chart(
            report.levels, report.values,
            title=f"{report.metric_id} vs distortion level",
            x_label="level", y_label="value",
        )
    else:
        raise DataError(f"cannot plot {type(report).__name__}")
    Path(path).write_text(svg)
