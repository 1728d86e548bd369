"""Deterministic SVG scenes: frame, erased pie slices, sample dots."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .geometry import TWO_PI, Sector

# Nominal rendered width in pixels; dot radii are given in pixels and
# converted to frame units through it.
NOMINAL_WIDTH_PX = 600.0
DOT_RADIUS_PX = 1.5


def _f(v: float) -> str:
    s = f"{v:.9f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def sector_path(sec: Sector) -> str:
    vx, vy, r = sec.vertex.x, sec.vertex.y, sec.radius
    if sec.span >= TWO_PI:
        return (
            f"M {_f(vx + r)} {_f(vy)} A {_f(r)} {_f(r)} 0 1 1 {_f(vx - r)} {_f(vy)} "
            f"A {_f(r)} {_f(r)} 0 1 1 {_f(vx + r)} {_f(vy)} Z"
        )
    sx, sy, ex, ey = sec.edge_vectors()
    large = 1 if sec.span > math.pi else 0
    return (
        f"M {_f(vx)} {_f(vy)} L {_f(vx + r * sx)} {_f(vy + r * sy)} "
        f"A {_f(r)} {_f(r)} 0 {large} 1 {_f(vx + r * ex)} {_f(vy + r * ey)} Z"
    )


def svg_text(region, sample) -> str:
    """SVG 1.1 document whose viewBox is the region's frame. A y-flip inside
    the drawing group keeps mathematical orientation (y up)."""
    f = region.frame
    pts = np.asarray(sample, dtype=float).reshape(-1, 2)
    dot = DOT_RADIUS_PX * f.width / NOMINAL_WIDTH_PX
    stroke = 0.5 * dot
    height_px = NOMINAL_WIDTH_PX * f.height / f.width
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_f(NOMINAL_WIDTH_PX)}" height="{_f(height_px)}" '
        f'viewBox="{_f(f.xmin)} {_f(f.ymin)} {_f(f.width)} {_f(f.height)}">',
        f'<g transform="matrix(1 0 0 -1 0 {_f(f.ymin + f.ymax)})">',
        f'<rect x="{_f(f.xmin)}" y="{_f(f.ymin)}" width="{_f(f.width)}" height="{_f(f.height)}" '
        f'fill="#ffffff" stroke="#000000" stroke-width="{_f(stroke)}"/>',
        '<g fill="#9ecae1" fill-opacity="0.6" stroke="none">',
    ]
    out += [f'<path d="{sector_path(s)}"/>' for s in region.sectors]
    out.append("</g>")
    out.append('<g fill="#000000">')
    out += [f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(dot)}"/>' for x, y in pts.tolist()]
    out += ["</g>", "</g>", "</svg>"]
    return "\n".join(out) + "\n"


def render_svg(region, sample, out) -> Path:
    out = Path(out)
    out.write_text(svg_text(region, sample), encoding="utf-8")
    return out
