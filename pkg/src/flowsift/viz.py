"""Minimal self-contained SVG line charts (no external dependencies).

CSV is the canonical output; these plots exist for quick visual checks.
"""

from __future__ import annotations

import os

import numpy as np

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 70, 20, 40, 55


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    return list(np.linspace(lo, hi, n))


def svg_line_chart(
    path: str | os.PathLike,
    x: np.ndarray,
    y: np.ndarray,
    x_label: str,
    y_label: str,
    title: str,
) -> None:
    x = np.asarray(x, np.float64)
    y = np.asarray(y, np.float64)
    finite = np.isfinite(x) & np.isfinite(y)
    x, y = x[finite], y[finite]
    if x.size == 0:
        x = np.array([0.0, 1.0])
        y = np.array([0.0, 0.0])
    x_lo, x_hi = float(x.min()), float(x.max())
    y_lo, y_hi = min(0.0, float(y.min())), max(1.0, float(y.max()))
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    span_x = _W - _ML - _MR
    span_y = _H - _MT - _MB

    def px(v: float) -> float:
        return _ML + (v - x_lo) / (x_hi - x_lo) * span_x

    def py(v: float) -> float:
        return _H - _MB - (v - y_lo) / (y_hi - y_lo) * span_y

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2:.1f}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{title}</text>',
    ]
    for tv in _ticks(x_lo, x_hi):
        xp = px(tv)
        parts.append(
            f'<line x1="{xp:.1f}" y1="{_H - _MB}" x2="{xp:.1f}" '
            f'y2="{_H - _MB + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{xp:.1f}" y="{_H - _MB + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{tv:.2f}</text>'
        )
    for tv in _ticks(y_lo, y_hi):
        yp = py(tv)
        parts.append(
            f'<line x1="{_ML - 5}" y1="{yp:.1f}" x2="{_ML}" y2="{yp:.1f}" '
            f'stroke="black"/>'
        )
        parts.append(
            f'<text x="{_ML - 9}" y="{yp + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tv:.2f}</text>'
        )
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{span_x}" height="{span_y}" '
        f'fill="none" stroke="black"/>'
    )
    pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))
    parts.append(
        f'<polyline points="{pts}" fill="none" stroke="#1f6fb2" stroke-width="1.6"/>'
    )
    parts.append(
        f'<text x="{_ML + span_x / 2:.1f}" y="{_H - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{x_label}</text>'
    )
    parts.append(
        f'<text x="18" y="{_MT + span_y / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {_MT + span_y / 2:.1f})">{y_label}</text>'
    )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
