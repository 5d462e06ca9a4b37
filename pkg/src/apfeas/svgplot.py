"""Minimal self-contained SVG line charts (no plotting dependencies)."""

from __future__ import annotations

import math


def _ticks(lo: float, hi: float, n: int = 6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * step:
        out.append(round(t, 12))
        t += step
    return out


def residual_curve_svg(residuals, title: str = "", width: int = 640,
                       height: int = 420) -> str:
    """Render log10 of a residual sequence against iteration index.

    Zero residuals (exact feasibility) are clipped to the smallest positive
    value on the curve so the log axis stays finite.
    """
    pos = [r for r in residuals if r > 0.0]
    floor = min(pos) if pos else 1e-16
    ys = [math.log10(max(r, floor)) for r in residuals]
    xs = list(range(len(residuals)))
    if len(xs) == 1:
        xs, ys = xs + [1], ys + ys

    mleft, mright, mtop, mbot = 64, 16, 34, 44
    pw, ph = width - mleft - mright, height - mtop - mbot
    x_lo, x_hi = 0, max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if y_hi - y_lo < 1e-9:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0

    def px(x):
        return mleft + pw * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        return mtop + ph * (y_hi - y) / (y_hi - y_lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width/2:.1f}" y="20" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">{title}</text>',
    ]
    axis = 'stroke="#333" stroke-width="1"'
    parts.append(f'<line x1="{mleft}" y1="{mtop}" x2="{mleft}" '
                 f'y2="{mtop+ph}" {axis}/>')
    parts.append(f'<line x1="{mleft}" y1="{mtop+ph}" x2="{mleft+pw}" '
                 f'y2="{mtop+ph}" {axis}/>')
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{mtop+ph}" x2="{x:.1f}" '
                     f'y2="{mtop+ph+4}" {axis}/>')
        parts.append(f'<text x="{x:.1f}" y="{mtop+ph+18}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{t:g}</text>')
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        parts.append(f'<line x1="{mleft-4}" y1="{y:.1f}" x2="{mleft}" '
                     f'y2="{y:.1f}" {axis}/>')
        parts.append(f'<text x="{mleft-8}" y="{y+4:.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{t:g}</text>')
    parts.append(f'<text x="{mleft+pw/2:.1f}" y="{height-8}" '
                 f'text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12">iteration</text>')
    parts.append(f'<text x="16" y="{mtop+ph/2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {mtop+ph/2:.1f})">'
                 f'log10 residual</text>')
    pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(xs, ys))
    parts.append(f'<polyline points="{pts}" fill="none" stroke="#1f4e9c" '
                 f'stroke-width="1.8"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
