"""Minimal deterministic SVG scatter plots.

Hand-rolled on purpose: the output must be a pure function of the
input (no timestamps, no library version strings), and the needs are
tiny — colored point series, cross markers for centers, a legend.
Coordinates are rounded to two decimals so files are byte-stable.
"""

from __future__ import annotations

import numpy as np

WIDTH = 640
HEIGHT = 640
MARGIN = 48
POINT_RADIUS = 2.5

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)
UNASSIGNED_COLOR = "#c7c7c7"


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Projection:
    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            lo = np.array([0.0, 0.0])
            hi = np.array([1.0, 1.0])
        else:
            lo = pts.min(axis=0)
            hi = pts.max(axis=0)
        span = np.maximum(hi - lo, 1e-9)
        pad = 0.05 * span
        self.lo = lo - pad
        self.span = span + 2 * pad
        self.scale = min((WIDTH - 2 * MARGIN) / self.span[0],
                         (HEIGHT - 2 * MARGIN) / self.span[1])

    def __call__(self, p):
        x = MARGIN + (p[0] - self.lo[0]) * self.scale
        # flip y so larger data values appear higher
        y = HEIGHT - MARGIN - (p[1] - self.lo[1]) * self.scale
        return x, y


def _cross(proj, point, color, size, tag, rotate=False):
    x, y = proj(point)
    s = size
    if rotate:
        segs = ((x - s, y - s, x + s, y + s), (x - s, y + s, x + s, y - s))
    else:
        segs = ((x - s, y, x + s, y), (x, y - s, x, y + s))
    lines = "".join(
        f'<line x1="{_fmt(a)}" y1="{_fmt(b)}" x2="{_fmt(c)}" y2="{_fmt(d)}"/>'
        for a, b, c, d in segs)
    return f'<g id="{tag}" stroke="{color}" stroke-width="2.5">{lines}</g>'


def scatter_svg(series, estimated_center=None, true_centers=(), title="") -> str:
    """Build an SVG scatter plot.

    ``series`` is a sequence of ``(label, points)`` pairs, each drawn
    as its own ``<g>`` element with a palette color (a label of
    ``"unassigned"`` gets a fixed gray).  ``estimated_center`` draws an
    upright cross; every entry of ``true_centers`` an X marker.
    """
    all_points = [np.asarray(p, dtype=float).reshape(-1, 2)
                  for _, p in series if len(p)]
    extra = [np.asarray(c, dtype=float).reshape(1, 2)
             for c in ([estimated_center] if estimated_center is not None else [])]
    extra += [np.asarray(c, dtype=float).reshape(1, 2) for c in true_centers]
    stacked = np.vstack(all_points + extra) if (all_points or extra) else np.empty((0, 2))
    proj = _Projection(stacked)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
    ]
    if title:
        parts.append(f'<text x="{MARGIN}" y="28" font-family="sans-serif" '
                     f'font-size="16">{title}</text>')
    palette_at = 0
    legend = []
    for label, pts in series:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        if label == "unassigned":
            color = UNASSIGNED_COLOR
        else:
            color = PALETTE[palette_at % len(PALETTE)]
            palette_at += 1
        legend.append((label, color))
        circles = "".join(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{POINT_RADIUS}"/>'
            for x, y in (proj(p) for p in pts))
        parts.append(f'<g id="series-{label}" fill="{color}" fill-opacity="0.75">'
                     f'{circles}</g>')
    for i, center in enumerate(true_centers):
        parts.append(_cross(proj, np.asarray(center, dtype=float), "#000000", 7,
                            f"true-center-{i}", rotate=True))
    if estimated_center is not None:
        parts.append(_cross(proj, np.asarray(estimated_center, dtype=float),
                            "#d62728", 9, "estimated-center"))
    for i, (label, color) in enumerate(legend):
        y = MARGIN + 18 * i
        parts.append(f'<circle cx="{WIDTH - MARGIN - 110}" cy="{y}" r="4" fill="{color}"/>')
        parts.append(f'<text x="{WIDTH - MARGIN - 100}" y="{y + 4}" '
                     f'font-family="sans-serif" font-size="12">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
