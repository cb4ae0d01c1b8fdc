"""SVG and ASCII drawings of a path (and its wall, if any)."""

from __future__ import annotations

import numpy as np

from .paths import FamilySpec, LatticePath, Wall


def _profile(path: LatticePath) -> np.ndarray:
    return np.concatenate(([0], path.heights))


def render_svg(path: LatticePath, spec: FamilySpec | None = None, width: int = 800,
               height: int = 300, margin: int = 10) -> str:
    """Polyline through (0, 0), (1, S_1), ..., (n, S_n); y grows upwards.

    A wall is drawn as a horizontal red segment at height h over [r, s].
    """
    prof = _profile(path)
    lo, hi = int(prof.min()), int(prof.max())
    wall = spec.constraint if spec is not None and isinstance(spec.constraint, Wall) else None
    if wall is not None and wall.r <= wall.s:
        lo, hi = min(lo, wall.h), max(hi, wall.h)
    span = max(hi - lo, 1)
    sx = (width - 2 * margin) / max(path.n, 1)
    sy = (height - 2 * margin) / span

    def xy(i, h):
        return f"{margin + i * sx:.2f},{margin + (hi - h) * sy:.2f}"

    pts = " ".join(xy(i, int(h)) for i, h in enumerate(prof))
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<line class="axis" x1="{margin}" y1="{margin + hi * sy:.2f}" '
        f'x2="{width - margin}" y2="{margin + hi * sy:.2f}" stroke="#bbb" stroke-width="1"/>',
    ]
    if wall is not None and wall.r <= wall.s:
        (x1, y1), (x2, y2) = (xy(wall.r, wall.h).split(","), xy(wall.s, wall.h).split(","))
        lines.append(f'<line class="wall" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                     f'stroke="#c00" stroke-width="3"/>')
    lines.append(f'<polyline class="path" points="{pts}" fill="none" stroke="#000" '
                 f'stroke-width="1.5"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_ascii(path: LatticePath, spec: FamilySpec | None = None) -> str:
    """One column per point 0..n and one row per height, top row = maximum.

    '*' marks the path, '=' the wall where it does not overlap the path, '.'
    the zero level elsewhere.
    """
    prof = _profile(path)
    lo, hi = int(prof.min()), int(prof.max())
    grid = [[" "] * len(prof) for _ in range(hi - lo + 1)]
    if lo <= 0 <= hi:
        grid[hi][:] = ["."] * len(prof)
    wall = spec.constraint if spec is not None and isinstance(spec.constraint, Wall) else None
    if wall is not None and wall.r <= wall.s and lo <= wall.h <= hi:
        for i in range(wall.r, wall.s + 1):
            grid[hi - wall.h][i] = "="
    for i, h in enumerate(prof):
        grid[hi - int(h)][i] = "*"
    return "\n".join("".join(row).rstrip() for row in grid) + "\n"
