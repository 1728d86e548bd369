"""Planar primitives: rotations, finite cones, pie sectors and parameter conversions.

Angles are counterclockwise-positive everywhere except in :func:`rotate`, whose
positive argument turns clockwise (the convention used by the eraser sweep).
All regions are open: points on a boundary, up to floating point equality,
are reported as outside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

# Sentinel height for unbounded (lighthouse) cones. Use sites substitute the
# frame diagonal; predicates treat it as +inf.
UNBOUNDED = math.inf


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class UnitVector:
    ux: float
    uy: float

    def __post_init__(self):
        if abs(self.ux * self.ux + self.uy * self.uy - 1.0) > 1e-12:
            raise ValueError(f"({self.ux}, {self.uy}) is not a unit vector")

    @classmethod
    def from_angle(cls, angle: float) -> "UnitVector":
        return cls(math.cos(angle), math.sin(angle))

    @property
    def angle(self) -> float:
        return math.atan2(self.uy, self.ux)


@dataclass(frozen=True)
class FiniteCone:
    """Open cone ``{z != vertex : <axis, (z-vertex)/|z-vertex|> > cos(opening/2)}``
    intersected with the open ball of radius ``height`` about the vertex."""

    vertex: Point
    axis: UnitVector
    opening: float
    height: float = UNBOUNDED

    def __post_init__(self):
        if not 0.0 < self.opening <= math.pi:
            raise ValueError(f"cone opening {self.opening} outside (0, pi]")
        if not self.height > 0.0:
            raise ValueError(f"cone height {self.height} must be positive")


@dataclass(frozen=True)
class Sector:
    """Pie slice of directions swept counterclockwise from ``start_angle``.

    Closed in angle, open in radius, vertex excluded. ``span`` may equal 2*pi,
    which represents a whole punctured disk.
    """

    vertex: Point
    start_angle: float
    span: float
    radius: float

    def __post_init__(self):
        if not 0.0 <= self.span <= TWO_PI:
            raise ValueError(f"sector span {self.span} outside [0, 2*pi]")
        if not self.radius > 0.0:
            raise ValueError(f"sector radius {self.radius} must be positive")

    @property
    def start_dir(self) -> UnitVector:
        return UnitVector(*self.edge_vectors()[:2])

    @property
    def end_dir(self) -> UnitVector:
        return UnitVector(*self.edge_vectors()[2:])

    def edge_vectors(self) -> tuple[float, float, float, float]:
        """(sx, sy, ex, ey): unit directions of the two bounding rays. Every
        membership test reads these exact floats."""
        a, b = self.start_angle, self.start_angle + self.span
        return math.cos(a), math.sin(a), math.cos(b), math.sin(b)

    def bbox(self) -> tuple[float, float, float, float]:
        """Axis-aligned box (xmin, xmax, ymin, ymax) enclosing the closure."""
        vx, vy, r = self.vertex.x, self.vertex.y, self.radius
        angles = [self.start_angle, self.start_angle + self.span]
        # Add the axis-aligned extreme directions crossed by the arc.
        k0 = math.ceil(self.start_angle / (math.pi / 2))
        k = k0
        while k * (math.pi / 2) <= self.start_angle + self.span:
            angles.append(k * (math.pi / 2))
            k += 1
            if k - k0 > 4:
                break
        xs = [vx] + [vx + r * math.cos(a) for a in angles]
        ys = [vy] + [vy + r * math.sin(a) for a in angles]
        return min(xs), max(xs), min(ys), max(ys)


@dataclass(frozen=True)
class DerivedParams:
    rho_prime: float
    h_prime: float
    gamma: float
    h_one: float
    k_const: float


def rotate(u: UnitVector, theta: float) -> UnitVector:
    """Rotate ``u`` clockwise by ``theta`` (counterclockwise when negative)."""
    c, s = math.cos(theta), math.sin(theta)
    x = c * u.ux + s * u.uy
    y = -s * u.ux + c * u.uy
    n = math.hypot(x, y)
    return UnitVector(x / n, y / n)


def wrap_angle(a):
    """Map angles into (-pi, pi]. Works on scalars and arrays."""
    w = np.mod(np.asarray(a, dtype=float) + math.pi, TWO_PI) - math.pi
    w = np.where(w <= -math.pi, w + TWO_PI, w)
    return float(w) if np.ndim(w) == 0 else w


def signed_angle(reference: UnitVector, target: UnitVector) -> float:
    """Counterclockwise angle from ``reference`` to ``target`` in (-pi, pi]."""
    cross = reference.ux * target.uy - reference.uy * target.ux
    dot = reference.ux * target.ux + reference.uy * target.uy
    a = math.atan2(cross, dot)
    return math.pi if a == -math.pi else a


def _as_points(p) -> np.ndarray:
    if isinstance(p, Point):
        return np.array([[p.x, p.y]])
    arr = np.asarray(p, dtype=float)
    return arr.reshape(-1, 2)


def cone_contains_many(cone: FiniteCone, pts) -> np.ndarray:
    pts = _as_points(pts)
    dx = pts[:, 0] - cone.vertex.x
    dy = pts[:, 1] - cone.vertex.y
    r2 = dx * dx + dy * dy
    dot = cone.axis.ux * dx + cone.axis.uy * dy
    c = math.cos(cone.opening / 2.0)
    # dot/|d| > c, rewritten without the division where the sign allows it
    with np.errstate(invalid="ignore", divide="ignore"):
        ang_ok = dot > c * np.sqrt(r2)
    inside = (r2 > 0.0) & ang_ok
    if math.isfinite(cone.height):
        inside &= r2 < cone.height * cone.height
    return inside


def cone_contains(cone: FiniteCone, p) -> bool:
    return bool(cone_contains_many(cone, p)[0])


def sector_contains_many(sector: Sector, pts) -> np.ndarray:
    pts = _as_points(pts)
    dx = pts[:, 0] - sector.vertex.x
    dy = pts[:, 1] - sector.vertex.y
    r2 = dx * dx + dy * dy
    inside = (r2 > 0.0) & (r2 < sector.radius * sector.radius)
    if sector.span >= TWO_PI:
        return inside
    sx, sy, ex, ey = sector.edge_vectors()
    if sector.span == 0.0:
        wedge = (sx * dy - sy * dx == 0.0) & (sx * dx + sy * dy > 0.0)
    elif sector.span <= math.pi:
        # closed wedge from the start ray counterclockwise to the end ray
        wedge = (sx * dy - sy * dx >= 0.0) & (dx * ey - dy * ex >= 0.0)
    else:
        # complement of the open wedge from the end ray round to the start ray
        wedge = ~((ex * dy - ey * dx > 0.0) & (dx * sy - dy * sx > 0.0))
    return inside & wedge


def sector_contains(sector: Sector, p) -> bool:
    return bool(sector_contains_many(sector, p)[0])


def derived_params(rho: float, h: float) -> DerivedParams:
    """Companion constants of a (rho, h) cone class.

    ``rho_prime``/``gamma`` equal rho up to pi/3 and (pi - rho)/2 beyond;
    both heights are read as (h/2)*sin(rho/2); ``k_const`` is the boundary
    rate constant 3 + 2/sin(rho/2).
    """
    if not 0.0 < rho <= math.pi:
        raise ValueError(f"rho={rho} outside (0, pi]")
    if not (h > 0.0 and math.isfinite(h)):
        raise ValueError(f"h={h} must be a positive finite number")
    rp = rho if rho <= math.pi / 3 else (math.pi - rho) / 2.0
    h1 = 0.5 * h * math.sin(rho / 2.0)
    return DerivedParams(
        rho_prime=rp,
        h_prime=h1,
        gamma=rp,
        h_one=h1,
        k_const=3.0 + 2.0 / math.sin(rho / 2.0),
    )


@dataclass(frozen=True)
class Frame:
    """Closed axis-aligned rectangle [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(f"degenerate frame {self}")

    @classmethod
    def unit(cls) -> "Frame":
        return cls(0.0, 1.0, 0.0, 1.0)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    def dilate(self, r: float) -> "Frame":
        return Frame(self.xmin - r, self.xmax + r, self.ymin - r, self.ymax + r)

    def contains_many(self, pts) -> np.ndarray:
        pts = _as_points(pts)
        return (
            (pts[:, 0] >= self.xmin)
            & (pts[:, 0] <= self.xmax)
            & (pts[:, 1] >= self.ymin)
            & (pts[:, 1] <= self.ymax)
        )

    def uniform(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random((size, 2))
        return np.column_stack(
            (self.xmin + self.width * u[:, 0], self.ymin + self.height * u[:, 1])
        )

    def as_list(self) -> list[float]:
        return [self.xmin, self.xmax, self.ymin, self.ymax]
