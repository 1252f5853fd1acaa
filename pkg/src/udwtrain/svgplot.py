"""Minimal log-log SVG plots of convergence reports, no plotting library."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 800, 600
LEFT, RIGHT, TOP, BOTTOM = 90, 30, 50, 80


def _num(x: float) -> str:
    return f"{x:.2f}"


def _decades(lo: float, hi: float):
    a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
    if a == b:
        b = a + 1
    return a, b


def loglog_svg(
    n_values: Sequence[int],
    errors: Sequence[float],
    *,
    slope: float = float("nan"),
    window=None,
    title: str = "",
    annotation: str = "",
    ylabel: str = "relative error",
) -> str:
    """SVG 1.1 document: error polyline, fitted power-law guide, labels."""
    pts = [(float(n), float(e)) for n, e in zip(n_values, errors) if n > 0 and e > 0]
    if pts:
        xlo, xhi = _decades(min(p[0] for p in pts), max(p[0] for p in pts))
        ylo, yhi = _decades(min(p[1] for p in pts), max(p[1] for p in pts))
    else:
        xlo, xhi, ylo, yhi = 0, 1, -1, 0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def X(n):
        return LEFT + (math.log10(n) - xlo) / (xhi - xlo) * pw

    def Y(e):
        return TOP + (yhi - math.log10(e)) / (yhi - ylo) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for k in range(xlo, xhi + 1):
        x = _num(X(10.0**k))
        out.append(f'<line x1="{x}" y1="{TOP}" x2="{x}" y2="{TOP + ph}" stroke="#dddddd"/>')
        out.append(f'<text x="{x}" y="{TOP + ph + 20}" font-size="14" text-anchor="middle">1e{k}</text>')
    for k in range(ylo, yhi + 1):
        y = _num(Y(10.0**k))
        out.append(f'<line x1="{LEFT}" y1="{y}" x2="{LEFT + pw}" y2="{y}" stroke="#dddddd"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y}" font-size="14" text-anchor="end" dominant-baseline="middle">1e{k}</text>')
    if pts:
        line = " ".join(f"{_num(X(n))},{_num(Y(e))}" for n, e in pts)
        out.append(f'<polyline points="{line}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
        for n, e in pts:
            out.append(f'<circle cx="{_num(X(n))}" cy="{_num(Y(e))}" r="3" fill="#1f77b4"/>')
    if pts and math.isfinite(slope) and window is not None:
        inside = [(n, e) for n, e in pts if window[0] <= n <= window[1]]
        if inside:
            # guide through the geometric centre of the fitted points
            lx = sum(math.log10(n) for n, _ in inside) / len(inside)
            ly = sum(math.log10(e) for _, e in inside) / len(inside)
            n0, n1 = 10.0**xlo, 10.0**xhi
            e0 = 10 ** (ly + slope * (xlo - lx))
            e1 = 10 ** (ly + slope * (xhi - lx))
            out.append(
                f'<clipPath id="plotarea"><rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}"/></clipPath>'
            )
            out.append(
                f'<line x1="{_num(X(n0))}" y1="{_num(Y(e0))}" x2="{_num(X(n1))}" y2="{_num(Y(e1))}" '
                f'stroke="#17becf" stroke-width="2" stroke-dasharray="8,5" clip-path="url(#plotarea)"/>'
            )
            out.append(
                f'<text x="{LEFT + pw - 10}" y="{TOP + 22}" font-size="14" text-anchor="end">'
                f"fitted slope {slope:.3f}</text>"
            )
    out.append(f'<text x="{WIDTH / 2:.0f}" y="30" font-size="18" text-anchor="middle">{escape(title)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.0f}" y="{HEIGHT - 40}" font-size="15" text-anchor="middle">N</text>')
    out.append(
        f'<text x="22" y="{TOP + ph / 2:.0f}" font-size="15" text-anchor="middle" '
        f'transform="rotate(-90 22 {TOP + ph / 2:.0f})">{escape(ylabel)}</text>'
    )
    if annotation:
        out.append(f'<text x="{LEFT}" y="{HEIGHT - 12}" font-size="13">{escape(annotation)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
