"""Hand-written SVG for polynomial curves and root scatters.

Coordinates are printed with fixed precision so identical inputs give
byte-identical files.
"""

from __future__ import annotations

import math
from typing import Sequence

from .intpoly import IntPolynomial

WIDTH, HEIGHT, PAD = 640, 480, 48
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _f(x: float) -> str:
    return f"{x:.2f}"


class _Canvas:
    def __init__(self, xlim, ylim, width=WIDTH, height=HEIGHT):
        self.xlim, self.ylim = xlim, ylim
        self.w, self.h = width, height
        self.parts: list[str] = []

    def sx(self, x):
        x0, x1 = self.xlim
        return PAD + (x - x0) / (x1 - x0) * (self.w - 2 * PAD)

    def sy(self, y):
        y0, y1 = self.ylim
        return self.h - PAD - (y - y0) / (y1 - y0) * (self.h - 2 * PAD)

    def add(self, s: str):
        self.parts.append(s)

    def axes(self):
        x0, x1 = self.xlim
        y0, y1 = self.ylim
        ax = 0.0 if y0 <= 0 <= y1 else y0
        ay = 0.0 if x0 <= 0 <= x1 else x0
        self.add(f'<line x1="{_f(self.sx(x0))}" y1="{_f(self.sy(ax))}" x2="{_f(self.sx(x1))}" '
                 f'y2="{_f(self.sy(ax))}" stroke="#444" stroke-width="1"/>')
        self.add(f'<line x1="{_f(self.sx(ay))}" y1="{_f(self.sy(y0))}" x2="{_f(self.sx(ay))}" '
                 f'y2="{_f(self.sy(y1))}" stroke="#444" stroke-width="1"/>')
        for x, anchor in ((x0, "start"), (x1, "end")):
            self.add(f'<text x="{_f(self.sx(x))}" y="{_f(self.sy(ax) + 14)}" font-size="11" '
                     f'text-anchor="{anchor}">{x:g}</text>')
        for y in (y0, y1):
            self.add(f'<text x="{_f(self.sx(ay) + 4)}" y="{_f(self.sy(y) + 4)}" font-size="11">{y:g}</text>')

    def render(self, title: str) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}" '
                f'viewBox="0 0 {self.w} {self.h}">')
        body = [head, '<rect width="100%" height="100%" fill="white"/>',
                f'<text x="{self.w // 2}" y="20" font-size="14" text-anchor="middle">{title}</text>']
        return "\n".join(body + self.parts + ["</svg>"]) + "\n"


def polynomial_curves(polys: Sequence[tuple[str, IntPolynomial]], xlim=(-12.0, 12.0),
                      ylim=(-1000.0, 1000.0), samples: int = 600, title: str = "") -> str:
    """Graphs of integer polynomials, clipped to the y-range."""
    c = _Canvas(xlim, ylim)
    c.axes()
    x0, x1 = xlim
    for n, (label, f) in enumerate(polys):
        color = COLORS[n % len(COLORS)]
        segments, current = [], []
        for s in range(samples + 1):
            x = x0 + (x1 - x0) * s / samples
            y = float(f(x))
            if ylim[0] <= y <= ylim[1]:
                current.append(f"{_f(c.sx(x))},{_f(c.sy(y))}")
            elif current:
                segments.append(current)
                current = []
        if current:
            segments.append(current)
        for seg in segments:
            if len(seg) > 1:
                c.add(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{" ".join(seg)}"/>')
        c.add(f'<text x="{WIDTH - PAD}" y="{PAD + 16 * n}" font-size="12" fill="{color}" '
              f'text-anchor="end">{label}</text>')
    return c.render(title)


def root_scatter(roots: Sequence[complex], title: str = "", label: str = "") -> str:
    """Roots in the complex plane with the unit circle."""
    r = max([1.25] + [abs(z) * 1.1 for z in roots])
    r = math.ceil(r)
    c = _Canvas((-r, r), (-r * 0.75, r * 0.75))
    c.axes()
    rx = c.sx(1.0) - c.sx(0.0)
    ry = c.sy(0.0) - c.sy(1.0)
    c.add(f'<ellipse cx="{_f(c.sx(0))}" cy="{_f(c.sy(0))}" rx="{_f(rx)}" ry="{_f(ry)}" '
          'fill="none" stroke="#888" stroke-dasharray="4 3"/>')
    for z in roots:
        inside = abs(z) < 1
        color = COLORS[1] if inside else COLORS[0]
        c.add(f'<circle cx="{_f(c.sx(z.real))}" cy="{_f(c.sy(z.imag))}" r="3.5" fill="{color}"/>')
    if label:
        c.add(f'<text x="{WIDTH - PAD}" y="{PAD}" font-size="12" text-anchor="end">{label}</text>')
    return c.render(title)
