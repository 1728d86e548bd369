"""Ground-truth planar sets with vectorised membership, plus samplers and CSV input."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .geometry import Frame, Point

Membership = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Shape:
    membership: Membership
    bounding_box: Frame
    known_area: float | None = None
    label: str = ""
    extras: dict = field(default_factory=dict)

    def contains_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        return self.membership(pts) & self.bounding_box.contains_many(pts)

    __call__ = contains_many

    def contains(self, p) -> bool:
        if isinstance(p, Point):
            p = (p.x, p.y)
        return bool(self.contains_many(np.asarray(p, dtype=float))[0])


def _cross(ax, ay, bx, by, px, py):
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax)


def in_triangle(pts: np.ndarray, tri, strict: bool) -> np.ndarray:
    """Point-in-triangle by edge cross-product signs; ``strict`` gives the open
    triangle, otherwise the closed one. Vertex order does not matter."""
    (ax, ay), (bx, by), (cx, cy) = tri
    x, y = pts[:, 0], pts[:, 1]
    d1 = _cross(ax, ay, bx, by, x, y)
    d2 = _cross(bx, by, cx, cy, x, y)
    d3 = _cross(cx, cy, ax, ay, x, y)
    if strict:
        return ((d1 > 0) & (d2 > 0) & (d3 > 0)) | ((d1 < 0) & (d2 < 0) & (d3 < 0))
    return ((d1 >= 0) & (d2 >= 0) & (d3 >= 0)) | ((d1 <= 0) & (d2 <= 0) & (d3 <= 0))


def triangle_area(tri) -> float:
    (ax, ay), (bx, by), (cx, cy) = tri
    return abs(_cross(ax, ay, bx, by, cx, cy)) / 2.0


def _box_minus_triangles(box: Frame, triangles) -> Membership:
    def membership(pts):
        inside = box.contains_many(pts)
        for tri in triangles:
            inside &= ~in_triangle(pts, tri, strict=True)
        return inside

    return membership


def triangle_notch_set() -> Shape:
    """Rectangle [0,1] x [0, t+1/2] with an open isosceles notch cut from the
    top edge down to (1/2, 1/2); t = tan(3*pi/8)/2, so the notch has a
    pi/4 opening at its apex."""
    t = 0.5 * math.tan(3 * math.pi / 8)
    top = t + 0.5
    box = Frame(0.0, 1.0, 0.0, top)
    notch = ((0.0, top), (1.0, top), (0.5, 0.5))
    return Shape(
        membership=_box_minus_triangles(box, [notch]),
        bounding_box=box,
        known_area=top - t / 2.0,
        label="triangle-notch",
        extras={"t": t, "notch": notch},
    )


def _rotate_xy(x, y, a):
    c, s = math.cos(a), math.sin(a)
    return c * x - s * y, s * x + c * y


def eight_triangle_star() -> Shape:
    """Eight closed triangles: (1,0), (1+s,s), (1+s,-s) with s = (sqrt2-1)/2,
    and its rotations about the origin by multiples of pi/4."""
    s = (math.sqrt(2.0) - 1.0) / 2.0
    base = ((1.0, 0.0), (1.0 + s, s), (1.0 + s, -s))
    tris = [tuple(_rotate_xy(x, y, k * math.pi / 4) for x, y in base) for k in range(8)]
    xs = [x for tri in tris for x, _ in tri]
    ys = [y for tri in tris for _, y in tri]
    box = Frame(min(xs), max(xs), min(ys), max(ys))

    def membership(pts):
        out = np.zeros(pts.shape[0], dtype=bool)
        for tri in tris:
            out |= in_triangle(pts, tri, strict=False)
        return out

    return Shape(
        membership=membership,
        bounding_box=box,
        known_area=sum(triangle_area(t) for t in tris),
        label="eight-star",
        extras={"s": s, "triangles": tris},
    )


TABLE_ONE_TRIANGLES = (
    ((0.0, 1.0), (0.5, 0.5), (1.0, 1.0)),
    ((0.0, 0.0), (0.5, 0.5), (1.0, 0.0)),
    ((0.0, 1 / 3), (0.5, 0.5), (0.0, 2 / 3)),
    ((1.0, 1 / 3), (0.5, 0.5), (1.0, 2 / 3)),
)


def table_one_set() -> Shape:
    """Unit square minus four open triangles sharing the apex (1/2, 1/2).
    Area 1/3; cone-convex with opening 2*arctan(1/3)."""
    box = Frame.unit()
    return Shape(
        membership=_box_minus_triangles(box, TABLE_ONE_TRIANGLES),
        bounding_box=box,
        known_area=1.0 - sum(triangle_area(t) for t in TABLE_ONE_TRIANGLES),
        label="S1",
        extras={"rho0": 2.0 * math.atan(1.0 / 3.0)},
    )


@dataclass(frozen=True)
class PathFunction:
    """Piecewise linear function on equally spaced abscissae of [0, 1]."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")
        if np.any(self.values <= 0):
            raise ValueError("path values must be positive")

    def __call__(self, x):
        return np.interp(x, self.grid, self.values)

    def integral(self) -> float:
        v, g = self.values, self.grid
        return float(np.sum(0.5 * (v[1:] + v[:-1]) * np.diff(g)))


def brownian_path(steps: int, rng: np.random.Generator, eps: float = 0.05) -> PathFunction:
    """Standard Brownian path on [0, 1] at ``steps`` increments, shifted so its
    minimum equals ``eps``."""
    if steps < 2:
        raise ValueError("steps must be at least 2")
    inc = rng.normal(0.0, math.sqrt(1.0 / steps), steps)
    w = np.concatenate(([0.0], np.cumsum(inc)))
    return PathFunction(np.linspace(0.0, 1.0, steps + 1), w - w.min() + eps)


def hypograph(f: PathFunction, label: str = "hypograph") -> Shape:
    box = Frame(float(f.grid[0]), float(f.grid[-1]), 0.0, float(f.values.max()))

    def membership(pts):
        x, y = pts[:, 0], pts[:, 1]
        inx = (x >= box.xmin) & (x <= box.xmax)
        return inx & (y >= 0.0) & (y <= f(x))

    return Shape(
        membership=membership,
        bounding_box=box,
        known_area=f.integral(),
        label=label,
        extras={"path": f},
    )


def brownian_hypograph(steps: int, rng: np.random.Generator, eps: float = 0.05) -> Shape:
    return hypograph(brownian_path(steps, rng, eps), label="brownian")


SHAPES = {
    "triangle-notch": triangle_notch_set,
    "eight-star": eight_triangle_star,
    "S1": table_one_set,
}


def shape_by_name(name: str, rng: np.random.Generator | None = None, steps: int = 1000) -> Shape:
    if name == "brownian":
        return brownian_hypograph(steps, rng if rng is not None else np.random.default_rng(0))
    aliases = {"s1": "S1", "table1": "S1", "star": "eight-star"}
    name = aliases.get(name, name)
    try:
        return SHAPES[name]()
    except KeyError:
        raise ValueError(
            f"unknown shape {name!r}; choose from {sorted(SHAPES) + ['brownian']}"
        ) from None


class RejectionBudgetExceeded(RuntimeError):
    pass


def sample_uniform(
    shape: Shape,
    n: int,
    rng: np.random.Generator,
    max_proposals: int = 10**9,
) -> np.ndarray:
    """``n`` i.i.d. uniform points on ``shape`` by rejection from its bounding box."""
    if n < 1:
        raise ValueError("n must be at least 1")
    box = shape.bounding_box
    chunks, have, proposed = [], 0, 0
    while have < n:
        if proposed >= max_proposals:
            raise RejectionBudgetExceeded(
                f"rejection sampling on {shape.label!r} exceeded {max_proposals} proposals"
            )
        batch = int(min(max_proposals - proposed, max(1024, 2 * (n - have))))
        cand = box.uniform(rng, batch)
        proposed += batch
        keep = cand[shape.contains_many(cand)]
        chunks.append(keep)
        have += keep.shape[0]
    return np.concatenate(chunks)[:n]


class PointParseError(ValueError):
    pass


def load_points(path, rescale: bool = False) -> np.ndarray:
    """Read a point CSV: header ``x,y``, one ``x,y`` pair per line, ``#`` comments.

    With ``rescale`` the bounding box of the points is mapped affinely onto
    the unit square (each axis separately).
    """
    text = Path(path).read_text(encoding="utf-8")
    rows = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            if line.replace(" ", "").lower() != "x,y":
                raise PointParseError(f"{path}:{lineno}: expected header 'x,y', got {raw!r}")
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise PointParseError(f"{path}:{lineno}: expected two comma-separated values, got {raw!r}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise PointParseError(f"{path}:{lineno}: cannot parse {raw!r}") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise PointParseError(f"{path}:{lineno}: non-finite coordinate in {raw!r}")
        rows.append((x, y))
    if not rows:
        raise PointParseError(f"{path}: no points")
    pts = np.array(rows, dtype=float)
    if rescale:
        lo = pts.min(axis=0)
        span = pts.max(axis=0) - lo
        span[span == 0] = 1.0
        pts = (pts - lo) / span
    return pts


def write_points(path, pts) -> None:
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    lines = ["x,y"] + [f"{x!r},{y!r}" for x, y in pts.tolist()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
