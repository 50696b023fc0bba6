"""Minimal deterministic SVG line plots (no plotting dependency).

Hand-rolled on purpose: the emitted bytes depend only on the data, so plot
files can be golden-hashed.  Fixed styling, fixed float formatting.
"""

from __future__ import annotations

import math
from pathlib import Path

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
W, H = 720, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 24, 40, 48


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _ticks(lo: float, hi: float, n: int = 5):
    if not math.isfinite(lo) or not math.isfinite(hi):
        return [0.0]
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def line_plot(path, curves, title: str = "", xlabel: str = "",
              ylabel: str = "", logx: bool = False) -> Path:
    """Write an SVG with one polyline per (label, x, y) curve.

    With logx=True the x data is plotted as log10(x) (tick labels keep the
    raw values); useful for epsilon sweeps.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    def tx(v):
        return math.log10(v) if logx else v

    xs_all = [tx(float(v)) for _, xs, _ in curves for v in xs]
    ys_all = [float(v) for _, _, ys in curves for v in ys]
    if not xs_all:
        raise ValueError("no curve data")
    xlo, xhi = min(xs_all), max(xs_all)
    ylo, yhi = min(ys_all), max(ys_all)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yho = ylo - 0.5, ylo + 0.5
        yhi = yho
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    px_w = W - MARGIN_L - MARGIN_R
    px_h = H - MARGIN_T - MARGIN_B

    def X(v):
        return MARGIN_L + (tx(v) - xlo) / (xhi - xlo) * px_w

    def Y(v):
        return MARGIN_T + (yhi - v) / (yhi - ylo) * px_h

    parts = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}">'
    )
    parts.append(f'<rect width="{W}" height="{H}" fill="white"/>')
    parts.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{px_w}" height="{px_h}" '
        f'fill="none" stroke="#444444" stroke-width="1"/>'
    )
    if title:
        parts.append(
            f'<text x="{W // 2}" y="24" text-anchor="middle" '
            f'font-family="monospace" font-size="14">{title}</text>'
        )
    for v in _ticks(xlo, xhi):
        xpix = MARGIN_L + (v - xlo) / (xhi - xlo) * px_w
        label = _fmt(10 ** v) if logx else _fmt(v)
        parts.append(
            f'<line x1="{_fmt(xpix)}" y1="{MARGIN_T + px_h}" x2="{_fmt(xpix)}" '
            f'y2="{MARGIN_T + px_h + 5}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{_fmt(xpix)}" y="{MARGIN_T + px_h + 20}" '
            f'text-anchor="middle" font-family="monospace" font-size="11">'
            f'{label}</text>'
        )
    for v in _ticks(ylo, yhi):
        ypix = MARGIN_T + (yhi - v) / (yhi - ylo) * px_h
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt(ypix)}" x2="{MARGIN_L}" '
            f'y2="{_fmt(ypix)}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(ypix + 4)}" text-anchor="end" '
            f'font-family="monospace" font-size="11">{_fmt(v)}</text>'
        )
    if xlabel:
        parts.append(
            f'<text x="{W // 2}" y="{H - 10}" text-anchor="middle" '
            f'font-family="monospace" font-size="12">{xlabel}</text>'
        )
    if ylabel:
        parts.append(
            f'<text x="16" y="{H // 2}" text-anchor="middle" '
            f'font-family="monospace" font-size="12" '
            f'transform="rotate(-90 16 {H // 2})">{ylabel}</text>'
        )
    for ci, (label, xs, ys) in enumerate(curves):
        color = PALETTE[ci % len(PALETTE)]
        pts = " ".join(f"{_fmt(X(float(a)))},{_fmt(Y(float(b)))}"
                       for a, b in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{pts}"/>'
        )
        parts.append(
            f'<text x="{W - MARGIN_R - 8}" y="{MARGIN_T + 16 + 16 * ci}" '
            f'text-anchor="end" font-family="monospace" font-size="12" '
            f'fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")
    return path
