"""SVG drawings of the lattice in the fractal picture and on the boundary ring."""

from __future__ import annotations

import math
from typing import Iterable, Mapping

from .lattice import Lattice

PALETTE = {
    "region": "#f4a261",
    "complement": "#e9ecef",
    "w_a": "#2a9d8f",
    "w_abar": "#8d99ae",
    "e": "#e63946",
    "highlight": "#264653",
}


def _svg(width: float, height: float, groups: Iterable[str]) -> str:
    body = "\n".join(groups)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'viewBox="0 0 {width:.2f} {height:.2f}">\n{body}\n</svg>\n'
    )


def _group(name: str, items: Iterable[str]) -> str:
    return f'<g id="{name}">\n' + "\n".join(items) + "\n</g>"


def fractal_svg(lattice: Lattice, region: Iterable[int] = (),
                hole_colors: Mapping[int, str] | None = None, scale: float = 24.0) -> str:
    """Qudit triangles in place; region qudits filled, holes optionally colored."""
    region = set(region)
    side = scale
    height_unit = side * math.sqrt(3) / 2
    n0 = lattice.linear_size
    width = n0 * side + 2 * side
    height = n0 * height_unit + 2 * side
    ox = width / 2

    def tri(x: float, y: float, size: float, up: bool = True) -> str:
        h = size * math.sqrt(3) / 2
        if up:
            pts = [(x, y), (x + size / 2, y + h), (x - size / 2, y + h)]
        else:
            pts = [(x - size / 2, y), (x + size / 2, y), (x, y + h)]
        return " ".join(f"{ox + px:.2f},{side + py:.2f}" for px, py in pts)

    cells, labels = [], []
    for q in range(lattice.qudit_count):
        x, y = lattice.coordinates(q)
        fill = PALETTE["region"] if q in region else PALETTE["complement"]
        cells.append(f'<polygon points="{tri(x * side, y * side, side)}" fill="{fill}" stroke="#333" '
                     f'stroke-width="0.6"><title>qudit {q} ring {lattice.ring[q]}</title></polygon>')
        labels.append(f'<text x="{ox + x * side:.2f}" y="{side + y * side + height_unit * 0.7:.2f}" '
                      f'font-size="{side * 0.28:.1f}" text-anchor="middle">{q}</text>')
    holes = []
    for h, color in (hole_colors or {}).items():
        hole = lattice.holes[h]
        size = 2 ** (hole.scale - 1)
        x2, row = 0, 0
        for j, d in enumerate(hole.prefix):
            u = 2 ** (lattice.level - j - 1)
            x2 += {0: 0, 1: u, 2: -u}[d]
            row += {0: 0, 1: u, 2: u}[d]
        # the hole is the downward triangle in the middle of its block
        x, y = x2 / 2 * side, (row + size) * height_unit
        holes.append(f'<polygon points="{tri(x, y, size * side, up=False)}" fill="{color}" '
                     f'fill-opacity="0.55" stroke="none"><title>hole {h}</title></polygon>')
    return _svg(width, height, [_group("lattice", cells + labels), _group("wedges", holes)])


def boundary_svg(lattice: Lattice, region: Iterable[int] = (), radius: float = 160.0) -> str:
    """Qudits on a circle in ring order; region qudits filled."""
    region = set(region)
    n = lattice.qudit_count
    size = 2 * radius + 80
    c = size / 2
    dot = max(2.0, min(10.0, math.pi * radius / n * 0.8))
    ring, marks = [], []
    ring.append(f'<circle cx="{c}" cy="{c}" r="{radius}" fill="none" stroke="#999"/>')
    for pos, q in enumerate(lattice.ring_order):
        a = 2 * math.pi * pos / n - math.pi / 2
        x, y = c + radius * math.cos(a), c + radius * math.sin(a)
        fill = PALETTE["region"] if q in region else PALETTE["complement"]
        marks.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{dot:.2f}" fill="{fill}" stroke="#333" '
                     f'stroke-width="0.6"><title>qudit {q} ring {pos}</title></circle>')
    return _svg(size, size, [_group("lattice", ring), _group("regions", marks)])


def wedge_colors(w_a: Iterable[int], w_abar: Iterable[int], e: Iterable[int]) -> dict[int, str]:
    colors = {h: PALETTE["w_a"] for h in w_a}
    colors.update({h: PALETTE["w_abar"] for h in w_abar})
    colors.update({h: PALETTE["e"] for h in e})
    return colors
