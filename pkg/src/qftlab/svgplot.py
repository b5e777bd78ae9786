"""Minimal SVG chart writer for the CLI.

Figures are for human inspection only; all numerical results live in the
CSV/JSON outputs.  No plotting dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["Series", "line_chart"]

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass
class Series:
    points: list[tuple[float, float]]
    label: str = ""
    color: str = ""
    markers: bool = False
    connect: bool = True


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    out = []
    v = first
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def line_chart(
    series: list[Series],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 860,
    height: int = 540,
) -> str:
    """Render data series into a standalone SVG document string."""
    pad_l, pad_r, pad_t, pad_b = 70, 20, 40, 55
    xs = [p[0] for s in series for p in s.points if math.isfinite(p[0])]
    ys = [p[1] for s in series for p in s.points if math.isfinite(p[1])]
    if not xs or not ys:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    # 5% margins so curves do not touch the frame
    mx, my = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
    x0, x1, y0, y1 = x0 - mx, x1 + mx, y0 - my, y1 + my
    plot_w, plot_h = width - pad_l - pad_r, height - pad_t - pad_b

    def sx(x: float) -> float:
        return pad_l + (x - x0) / (x1 - x0) * plot_w

    def sy(y: float) -> float:
        return pad_t + (y1 - y) / (y1 - y0) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{pad_l}" y="{pad_t}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" '
                     f'font-size="15">{title}</text>')
    for tx in _ticks(x0, x1):
        parts.append(f'<line x1="{sx(tx):.1f}" y1="{pad_t}" x2="{sx(tx):.1f}" '
                     f'y2="{pad_t + plot_h}" stroke="#ddd"/>')
        parts.append(f'<text x="{sx(tx):.1f}" y="{pad_t + plot_h + 16}" '
                     f'text-anchor="middle">{tx:g}</text>')
    for ty in _ticks(y0, y1):
        parts.append(f'<line x1="{pad_l}" y1="{sy(ty):.1f}" x2="{pad_l + plot_w}" '
                     f'y2="{sy(ty):.1f}" stroke="#ddd"/>')
        parts.append(f'<text x="{pad_l - 6}" y="{sy(ty) + 4:.1f}" '
                     f'text-anchor="end">{ty:g}</text>')
    if xlabel:
        parts.append(f'<text x="{width / 2:.1f}" y="{height - 12}" '
                     f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="18" y="{height / 2:.1f}" text-anchor="middle" '
                     f'transform="rotate(-90 18 {height / 2:.1f})">{ylabel}</text>')

    legend_y = pad_t + 14
    for i, s in enumerate(series):
        color = s.color or _PALETTE[i % len(_PALETTE)]
        pts = [(sx(x), sy(y)) for x, y in s.points
               if math.isfinite(x) and math.isfinite(y)]
        if s.connect and len(pts) > 1:
            d = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
            parts.append(f'<polyline points="{d}" fill="none" stroke="{color}" '
                         'stroke-width="1.5"/>')
        if s.markers or not s.connect:
            for x, y in pts:
                parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="2" '
                             f'fill="{color}"/>')
        if s.label:
            parts.append(f'<rect x="{pad_l + plot_w - 150}" y="{legend_y - 9}" '
                         f'width="12" height="4" fill="{color}"/>')
            parts.append(f'<text x="{pad_l + plot_w - 133}" y="{legend_y}">'
                         f'{s.label}</text>')
            legend_y += 16
    parts.append("</svg>")
    return "\n".join(parts)
