"""Stochastic cone eraser for the rho,h-cone-convex hull by complement.

Starting from a rectangular frame, random cones with fixed opening ``rho`` and
height ``h`` are thrown at the sample. Each cone that misses every sample point
is swept clockwise and counterclockwise (up to a quarter turn each way) while
it stays empty, and the swept pie slice is removed from the frame. What is left
after ``N`` removals approximates the hull. A disk eraser of radius ``r`` gives
the analogous approximation of the r-convex hull.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .geometry import (
    TWO_PI,
    FiniteCone,
    Frame,
    Point,
    Sector,
    UnitVector,
)

# Erased sectors are pulled inward by this many radians on each flank so that a
# sample point sitting exactly on a blocking ray never lands inside the closed
# angular interval through rounding.
FLANK_GUARD = 1e-12

REGION_SCHEMA_VERSION = 1


class EraseMode(str, enum.Enum):
    PAPER_LITERAL = "paper"
    EXTENDED = "extended"


class EmptyConeRequired(ValueError):
    """The seed cone handed to :func:`max_sweep` contains sample points."""


@dataclass(frozen=True)
class EraserConfig:
    rho: float
    h: float
    target_erasures: int = 200
    max_attempts_per_erasure: int = 100_000
    erase_mode: EraseMode = EraseMode.EXTENDED
    axis_constraint: tuple[float, float] | None = None
    seed: int = 0
    batch_size: int = 256

    def __post_init__(self):
        if not 0.0 < self.rho <= math.pi:
            raise ValueError(f"rho={self.rho} outside (0, pi]")
        if not self.h > 0.0:
            raise ValueError(f"h={self.h} must be positive")
        if self.target_erasures < 1:
            raise ValueError("target_erasures must be at least 1")
        if self.max_attempts_per_erasure < 1:
            raise ValueError("max_attempts_per_erasure must be at least 1")
        object.__setattr__(self, "erase_mode", EraseMode(self.erase_mode))
        if self.axis_constraint is not None:
            lo, hi = self.axis_constraint
            if not lo <= hi:
                raise ValueError(f"empty axis constraint {self.axis_constraint}")


@dataclass(frozen=True)
class SweepResult:
    theta_cw: float
    theta_ccw: float


@dataclass
class ErasedRegion:
    """Frame minus an append-only list of erased sectors."""

    frame: Frame
    sectors: list[Sector] = field(default_factory=list)
    attempts: int = 0
    erasures: int = 0
    early_stopped: bool = False
    config: dict = field(default_factory=dict)
    seed: int | None = None
    grid_size: int = 32

    def __post_init__(self):
        self._cols: list[list[float]] = [[] for _ in range(12)]
        self._cache_len = -1
        self._cache = None
        sectors, self.sectors = list(self.sectors), []
        for sec in sectors:
            self.append(sec)

    def append(self, sector: Sector) -> None:
        self.sectors.append(sector)
        self.erasures = len(self.sectors)
        sx, sy, ex, ey = sector.edge_vectors()
        bx0, bx1, by0, by1 = sector.bbox()
        pad = 1e-9 * sector.radius
        row = (
            sector.vertex.x, sector.vertex.y, sector.span, sector.radius * sector.radius,
            sx, sy, ex, ey, bx0 - pad, bx1 + pad, by0 - pad, by1 + pad,
        )
        for col, v in zip(self._cols, row):
            col.append(v)

    def _arrays(self):
        if self._cache_len != len(self.sectors):
            cols = [np.array(c, dtype=float) for c in self._cols]
            vx, vy, span, rad2, sx, sy, ex, ey, bx0, bx1, by0, by1 = cols
            g, f = self.grid_size, self.frame
            ptr, ids = _kernels.build_index(
                f.xmin, f.ymin, f.width / g, f.height / g, g, bx0, bx1, by0, by1, vx, vy, rad2
            )
            self._cache = (ptr, ids, vx, vy, span, rad2, sx, sy, ex, ey)
            self._cache_len = len(self.sectors)
        return self._cache

    def contains_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        f = self.frame
        return _kernels.region_contains(
            np.ascontiguousarray(pts[:, 0]),
            np.ascontiguousarray(pts[:, 1]),
            f.xmin, f.xmax, f.ymin, f.ymax, self.grid_size, *self._arrays(),
        )

    def contains(self, p) -> bool:
        if isinstance(p, Point):
            p = (p.x, p.y)
        return bool(self.contains_many(np.asarray(p, dtype=float))[0])

    __call__ = contains_many

    def to_dict(self) -> dict:
        return {
            "schema_version": REGION_SCHEMA_VERSION,
            "frame": {
                "xmin": self.frame.xmin,
                "xmax": self.frame.xmax,
                "ymin": self.frame.ymin,
                "ymax": self.frame.ymax,
            },
            "sectors": [
                {
                    "vertex": [s.vertex.x, s.vertex.y],
                    "startAngle": s.start_angle,
                    "span": s.span,
                    "radius": s.radius,
                }
                for s in self.sectors
            ],
            "attempts": self.attempts,
            "erasures": self.erasures,
            "early_stopped": self.early_stopped,
            "config": self.config,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ErasedRegion":
        if d.get("schema_version") != REGION_SCHEMA_VERSION:
            raise ValueError(f"unsupported region schema {d.get('schema_version')!r}")
        fr = d["frame"]
        region = cls(
            frame=Frame(fr["xmin"], fr["xmax"], fr["ymin"], fr["ymax"]),
            attempts=int(d["attempts"]),
            early_stopped=bool(d["early_stopped"]),
            config=dict(d["config"]),
            seed=d["seed"],
        )
        for s in d["sectors"]:
            region.append(
                Sector(Point(*s["vertex"]), s["startAngle"], s["span"], s["radius"])
            )
        if region.erasures != d["erasures"]:
            raise ValueError("erasure counter does not match sector list")
        return region

    @classmethod
    def from_json(cls, text: str) -> "ErasedRegion":
        return cls.from_dict(json.loads(text))


def _as_xy(sample) -> np.ndarray:
    pts = np.asarray(sample, dtype=float).reshape(-1, 2)
    if pts.shape[0] == 0:
        raise ValueError("sample must hold at least one point")
    return pts


def draw_candidates(frame: Frame, config: EraserConfig, rng: np.random.Generator, size: int):
    """Draw ``size`` (vertex, axis angle) pairs: vertices uniform on the frame,
    axis angles uniform on the circle or on ``config.axis_constraint``."""
    vertices = frame.uniform(rng, size)
    if config.axis_constraint is None:
        angles = rng.uniform(-math.pi, math.pi, size)
    else:
        lo, hi = config.axis_constraint
        angles = rng.uniform(lo, hi, size)
    return vertices, angles


def draw_candidate(frame: Frame, config: EraserConfig, rng: np.random.Generator):
    v, a = draw_candidates(frame, config, rng, 1)
    return Point(float(v[0, 0]), float(v[0, 1])), UnitVector.from_angle(float(a[0]))


def max_sweep(sample, vertex: Point, axis: UnitVector, rho: float, h: float) -> SweepResult:
    """Largest clockwise and counterclockwise turns, capped at a quarter turn,
    through which the rho,h-cone at ``vertex`` stays free of sample points."""
    pts = _as_xy(sample)
    cone = FiniteCone(vertex, axis, rho, h)
    if _cone_hits(cone, pts):
        raise EmptyConeRequired(f"seed cone at ({vertex.x}, {vertex.y}) holds sample points")
    return _sweep(np.ascontiguousarray(pts[:, 0]), np.ascontiguousarray(pts[:, 1]),
                  vertex.x, vertex.y, axis.ux, axis.uy, rho, h)


def _sweep(px, py, vx, vy, ux, uy, rho, h) -> SweepResult:
    cw, ccw = _kernels.sweep_gaps(px, py, vx, vy, ux, uy, rho / 2.0, h * h)
    theta_cw = min(math.pi / 2, cw)
    theta_ccw = min(math.pi / 2, ccw)
    # Rounding can leave a blocking point marginally inside the seed cone.
    return SweepResult(max(theta_cw, 0.0), -max(theta_ccw, 0.0))


def _cone_hits(cone: FiniteCone, pts: np.ndarray) -> bool:
    return not _kernels.empty_cones(
        np.ascontiguousarray(pts[:, 0]),
        np.ascontiguousarray(pts[:, 1]),
        np.array([cone.vertex.x]),
        np.array([cone.vertex.y]),
        np.array([cone.axis.ux]),
        np.array([cone.axis.uy]),
        math.cos(cone.opening / 2.0),
        cone.height * cone.height,
    )[0]


def _clamp_sweep(sweep: SweepResult, axis_angle: float, config: EraserConfig) -> SweepResult:
    if config.axis_constraint is None:
        return sweep
    lo, hi = config.axis_constraint
    return SweepResult(
        max(0.0, min(sweep.theta_cw, axis_angle - lo)),
        -max(0.0, min(-sweep.theta_ccw, hi - axis_angle)),
    )


def sector_from_sweep(
    vertex: Point, axis_angle: float, sweep: SweepResult, rho: float, h: float, mode: EraseMode
) -> Sector:
    start = axis_angle - sweep.theta_cw
    span = sweep.theta_cw - sweep.theta_ccw
    if EraseMode(mode) is EraseMode.EXTENDED:
        start -= rho / 2.0 - FLANK_GUARD
        span += rho - 2.0 * FLANK_GUARD
    return Sector(vertex, start, min(span, TWO_PI), h)


def _erase_candidate(
    region: ErasedRegion, pts: np.ndarray, config: EraserConfig, vertex: Point, axis_angle: float
) -> bool:
    axis = UnitVector.from_angle(axis_angle)
    region.attempts += 1
    if _cone_hits(FiniteCone(vertex, axis, config.rho, config.h), pts):
        return False
    sweep = _clamp_sweep(max_sweep(pts, vertex, axis, config.rho, config.h), axis_angle, config)
    region.append(
        sector_from_sweep(vertex, axis_angle, sweep, config.rho, config.h, config.erase_mode)
    )
    return True


def erase_step(region: ErasedRegion, sample, config: EraserConfig, rng: np.random.Generator) -> bool:
    """One draw-check-erase cycle. Returns whether a sector was appended."""
    pts = _as_xy(sample)
    vertex, axis = draw_candidate(region.frame, config, rng)
    return _erase_candidate(region, pts, config, vertex, axis.angle)


def _config_echo(config: EraserConfig) -> dict:
    d = asdict(config)
    d["erase_mode"] = EraseMode(config.erase_mode).value
    d["estimator"] = "cone"
    if config.axis_constraint is not None:
        d["axis_constraint"] = list(config.axis_constraint)
    return d


def _check_inside(pts: np.ndarray, frame: Frame) -> None:
    if not frame.contains_many(pts).all():
        raise ValueError("sample points must lie inside the frame")


def run(sample, frame: Frame, config: EraserConfig, rng: np.random.Generator | None = None) -> ErasedRegion:
    """Erase until ``config.target_erasures`` sectors are removed.

    Candidates are drawn in batches of ``config.batch_size`` from one stream,
    so a run is a deterministic function of the seed and the batch size. If
    ``max_attempts_per_erasure`` consecutive candidates all hit the sample the
    run stops early and ``region.early_stopped`` is set.
    """
    pts = _as_xy(sample)
    _check_inside(pts, frame)
    if rng is None:
        rng = np.random.default_rng(config.seed)
    region = ErasedRegion(frame=frame, config=_config_echo(config), seed=config.seed)
    px = np.ascontiguousarray(pts[:, 0])
    py = np.ascontiguousarray(pts[:, 1])
    cos_half = math.cos(config.rho / 2.0)
    h2 = config.h * config.h
    misses = 0
    while region.erasures < config.target_erasures:
        verts, angles = draw_candidates(frame, config, rng, config.batch_size)
        ux = np.array([math.cos(a) for a in angles.tolist()])
        uy = np.array([math.sin(a) for a in angles.tolist()])
        ok = _kernels.empty_cones(px, py, verts[:, 0].copy(), verts[:, 1].copy(), ux, uy, cos_half, h2)
        for i in range(config.batch_size):
            region.attempts += 1
            if not ok[i]:
                misses += 1
                if misses >= config.max_attempts_per_erasure:
                    region.early_stopped = True
                    return region
                continue
            misses = 0
            vx, vy, a = float(verts[i, 0]), float(verts[i, 1]), float(angles[i])
            sweep = _sweep(px, py, vx, vy, math.cos(a), math.sin(a), config.rho, config.h)
            sweep = _clamp_sweep(sweep, a, config)
            region.append(
                sector_from_sweep(Point(vx, vy), a, sweep, config.rho, config.h, config.erase_mode)
            )
            if region.erasures >= config.target_erasures:
                break
    return region


def run_ball_eraser(
    sample,
    frame: Frame,
    r: float,
    n_erasures: int,
    max_attempts: int = 100_000,
    seed: int = 0,
    rng: np.random.Generator | None = None,
    batch_size: int = 256,
) -> ErasedRegion:
    """Disk eraser: remove open disks of radius ``r`` that miss the sample.

    Centres are uniform on the frame dilated by ``r`` so that disks poking
    into the frame from outside are reachable.
    """
    if not r > 0.0:
        raise ValueError(f"r={r} must be positive")
    if n_erasures < 1:
        raise ValueError("n_erasures must be at least 1")
    pts = _as_xy(sample)
    _check_inside(pts, frame)
    if rng is None:
        rng = np.random.default_rng(seed)
    region = ErasedRegion(
        frame=frame,
        config={"estimator": "ball", "r": r, "target_erasures": n_erasures,
                "max_attempts_per_erasure": max_attempts, "seed": seed},
        seed=seed,
    )
    centres_frame = frame.dilate(r)
    px = np.ascontiguousarray(pts[:, 0])
    py = np.ascontiguousarray(pts[:, 1])
    misses = 0
    while region.erasures < n_erasures:
        c = centres_frame.uniform(rng, batch_size)
        ok = _kernels.empty_disks(px, py, c[:, 0].copy(), c[:, 1].copy(), r * r)
        for i in range(batch_size):
            region.attempts += 1
            if not ok[i]:
                misses += 1
                if misses >= max_attempts:
                    region.early_stopped = True
                    return region
                continue
            misses = 0
            region.append(Sector(Point(float(c[i, 0]), float(c[i, 1])), 0.0, TWO_PI, r))
            if region.erasures >= n_erasures:
                break
    return region
