"""Self-contained SVG scatter plots of resonance clouds in the mu-plane."""

from __future__ import annotations

import math

SIZE = 800
MARGIN = 40


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def cloud_svg(points, q: int, title: str = "") -> str:
    """Scatter of (re, im, multiplicity) triples with the reference geometry.

    Unit circle in blue, radius 1/sqrt(q) circle in green, black dots at
    +-sqrt(q) and green dots at +-1/sqrt(q).  The view is the square
    |Re|, |Im| <= max(1.2 sqrt(q), 2); points outside are clipped.
    """
    extent = max(1.2 * math.sqrt(q), 2.0)
    span = SIZE - 2 * MARGIN

    def sx(x):
        return MARGIN + (x + extent) / (2 * extent) * span

    def sy(y):
        return MARGIN + (extent - y) / (2 * extent) * span

    def r_px(r):
        return r / (2 * extent) * span

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<rect x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>',
           f'<line x1="{_fmt(sx(-extent))}" y1="{_fmt(sy(0))}" x2="{_fmt(sx(extent))}" y2="{_fmt(sy(0))}" stroke="#999" stroke-width="1"/>',
           f'<line x1="{_fmt(sx(0))}" y1="{_fmt(sy(-extent))}" x2="{_fmt(sx(0))}" y2="{_fmt(sy(extent))}" stroke="#999" stroke-width="1"/>',
           f'<circle cx="{_fmt(sx(0))}" cy="{_fmt(sy(0))}" r="{_fmt(r_px(1.0))}" fill="none" stroke="blue" stroke-width="1.5"/>',
           f'<circle cx="{_fmt(sx(0))}" cy="{_fmt(sy(0))}" r="{_fmt(r_px(1 / math.sqrt(q)))}" fill="none" stroke="green" stroke-width="1.5"/>']
    for x in (math.sqrt(q), -math.sqrt(q)):
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(0))}" r="5" fill="black"/>')
    for x in (1 / math.sqrt(q), -1 / math.sqrt(q)):
        out.append(f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(0))}" r="5" fill="green"/>')
    for re, im, mult in points:
        if abs(re) > extent or abs(im) > extent:
            continue
        rad = 3 + 1.5 * (mult - 1)
        out.append(f'<circle cx="{_fmt(sx(re))}" cy="{_fmt(sy(im))}" r="{_fmt(rad)}" '
                   f'fill="red" fill-opacity="0.7"><title>{re:.12e},{im:.12e} x{mult}</title></circle>')
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 12}" font-family="monospace" font-size="14">{title}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
