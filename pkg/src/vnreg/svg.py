"""Minimal self-contained SVG line plots.

The experiment harness emits CSV as the canonical output and uses this module
to render convenience plots without any plotting dependency.  Output is fully
deterministic: fixed layout, fixed formatting, no timestamps.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError

__all__ = ["LineSeries", "line_plot", "write_line_plot"]

# Default palette: dark, distinguishable hues.
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#7f7f7f"]

_MARGIN_LEFT = 64.0
_MARGIN_RIGHT = 16.0
_MARGIN_TOP = 34.0
_MARGIN_BOTTOM = 46.0


class LineSeries:
    """One labeled polyline: x values, y values, optional color and dashing."""

    def __init__(self, label, x, y, color=None, dashed=False):
        self.label = str(label)
        self.x = np.asarray(x, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.float64)
        if self.x.shape != self.y.shape or self.x.ndim != 1 or self.x.size == 0:
            raise ValidationError("series x and y must be matching nonempty vectors")
        self.color = color
        self.dashed = bool(dashed)


def _fmt(value: float) -> str:
    """Fixed, locale-independent coordinate formatting."""

    return f"{value:.2f}".rstrip("0").rstrip(".")


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi]."""

    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValidationError("plot range must be finite")
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _tick_label(value: float) -> str:
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return f"{value:.6g}"


def line_plot(series, title="", xlabel="", ylabel="", width=640, height=440) -> str:
    """Render labeled line series to an SVG document string."""

    series = list(series)
    if not series:
        raise ValidationError("at least one series is required")
    x_lo = min(float(s.x.min()) for s in series)
    x_hi = max(float(s.x.max()) for s in series)
    y_lo = min(float(s.y.min()) for s in series)
    y_hi = max(float(s.y.max()) for s in series)
    if y_hi == y_lo:
        y_hi += 1.0
    if x_hi == x_lo:
        x_hi += 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    plot_w = width - _MARGIN_LEFT - _MARGIN_RIGHT
    plot_h = height - _MARGIN_TOP - _MARGIN_BOTTOM

    def sx(x: float) -> float:
        return _MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y: float) -> float:
        return _MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    # Axes frame
    parts.append(
        f'<rect x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(_MARGIN_TOP)}" '
        f'width="{_fmt(plot_w)}" height="{_fmt(plot_h)}" fill="none" '
        'stroke="#444444" stroke-width="1"/>'
    )
    # Ticks and grid
    for t in _nice_ticks(x_lo, x_hi):
        if t < x_lo - 1e-12 or t > x_hi + 1e-12:
            continue
        px = sx(t)
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(_MARGIN_TOP)}" x2="{_fmt(px)}" '
            f'y2="{_fmt(_MARGIN_TOP + plot_h)}" stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(_MARGIN_TOP + plot_h + 18)}" '
            'font-family="sans-serif" font-size="11" text-anchor="middle" '
            f'fill="#222222">{_tick_label(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        if t < y_lo - 1e-12 or t > y_hi + 1e-12:
            continue
        py = sy(t)
        parts.append(
            f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{_fmt(py)}" '
            f'x2="{_fmt(_MARGIN_LEFT + plot_w)}" y2="{_fmt(py)}" '
            'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 6)}" y="{_fmt(py + 4)}" '
            'font-family="sans-serif" font-size="11" text-anchor="end" '
            f'fill="#222222">{_tick_label(t)}</text>'
        )
    # Series
    for i, s in enumerate(series):
        color = s.color or _PALETTE[i % len(_PALETTE)]
        points = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in zip(s.x, s.y))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        parts.append(
            f'<polyline points="{points}" fill="none" stroke="{color}" '
            f'stroke-width="1.8"{dash}/>'
        )
    # Legend (top-left inside plot)
    for i, s in enumerate(series):
        color = s.color or _PALETTE[i % len(_PALETTE)]
        ly = _MARGIN_TOP + 16 + 16 * i
        lx = _MARGIN_LEFT + 10
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        parts.append(
            f'<line x1="{_fmt(lx)}" y1="{_fmt(ly - 4)}" x2="{_fmt(lx + 22)}" '
            f'y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="1.8"{dash}/>'
        )
        parts.append(
            f'<text x="{_fmt(lx + 28)}" y="{_fmt(ly)}" font-family="sans-serif" '
            f'font-size="11" fill="#222222">{s.label}</text>'
        )
    # Labels
    if title:
        parts.append(
            f'<text x="{_fmt(width / 2)}" y="20" font-family="sans-serif" '
            f'font-size="14" text-anchor="middle" fill="#111111">{title}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT + plot_w / 2)}" y="{_fmt(height - 10)}" '
            'font-family="sans-serif" font-size="12" text-anchor="middle" '
            f'fill="#111111">{xlabel}</text>'
        )
    if ylabel:
        cy = _MARGIN_TOP + plot_h / 2
        parts.append(
            f'<text x="16" y="{_fmt(cy)}" font-family="sans-serif" font-size="12" '
            f'text-anchor="middle" fill="#111111" '
            f'transform="rotate(-90 16 {_fmt(cy)})">{ylabel}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_line_plot(path, series, title="", xlabel="", ylabel="", width=640, height=440) -> None:
    """Write :func:`line_plot` output to ``path``."""

    with open(path, "w") as fh:
        fh.write(line_plot(series, title, xlabel, ylabel, width, height))
