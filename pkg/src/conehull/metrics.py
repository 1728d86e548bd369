"""Set distances: Hausdorff on point sets and on rasterised regions, and the
Monte Carlo measure of a symmetric difference."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.ndimage import distance_transform_edt
from scipy.spatial import cKDTree

from .geometry import Frame

Membership = Callable[[np.ndarray], np.ndarray]

DEFAULT_MC_BUDGET = 4000


@dataclass(frozen=True)
class GridSpec:
    frame: Frame
    resolution: int

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError("grid resolution must be at least 2")

    @property
    def cell(self) -> tuple[float, float]:
        return self.frame.width / self.resolution, self.frame.height / self.resolution

    @property
    def diagonal(self) -> float:
        return math.hypot(*self.cell)

    def centres(self) -> np.ndarray:
        """Cell centres, row-major with rows along y."""
        cw, ch = self.cell
        xs = self.frame.xmin + cw * (np.arange(self.resolution) + 0.5)
        ys = self.frame.ymin + ch * (np.arange(self.resolution) + 0.5)
        gx, gy = np.meshgrid(xs, ys)
        return np.column_stack((gx.ravel(), gy.ravel()))

    def classify(self, membership: Membership) -> np.ndarray:
        mask = np.asarray(membership(self.centres()), dtype=bool)
        return mask.reshape(self.resolution, self.resolution)


@dataclass(frozen=True)
class MetricEstimate:
    """``standard_error`` is set for Monte Carlo values; grid values carry a
    deterministic ``error_bound`` (one cell diagonal) instead."""

    value: float
    budget: int
    standard_error: float | None = None
    error_bound: float | None = None


def _xy(a) -> np.ndarray:
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    if a.shape[0] == 0:
        raise ValueError("point set must be nonempty")
    return a


def dist_to_point_set(p, A) -> float:
    A = _xy(A)
    p = np.asarray(p, dtype=float).reshape(2)
    return float(np.sqrt(np.min(np.sum((A - p) ** 2, axis=1))))


def dists_to_point_set(P, A) -> np.ndarray:
    """Nearest-neighbour distances from every row of ``P`` to the set ``A``."""
    d, _ = cKDTree(_xy(A)).query(np.asarray(P, dtype=float).reshape(-1, 2))
    return d


def hausdorff_point_sets(A, B) -> float:
    A, B = _xy(A), _xy(B)
    ab = cKDTree(B).query(A)[0].max()
    ba = cKDTree(A).query(B)[0].max()
    return float(max(ab, ba))


def _directed_grid(src: np.ndarray, dst: np.ndarray, sampling) -> float:
    # Euclidean distance from every cell to the nearest dst cell, read off at src.
    if not src.any():
        return 0.0
    d = distance_transform_edt(~dst, sampling=sampling)
    return float(d[src].max())


def hausdorff_masks(a: np.ndarray, b: np.ndarray, grid: GridSpec) -> float:
    if not a.any():
        raise ValueError("first set does not meet the grid")
    if not b.any():
        raise ValueError("second set does not meet the grid")
    cw, ch = grid.cell
    sampling = (ch, cw)
    return max(_directed_grid(a, b, sampling), _directed_grid(b, a, sampling))


def hausdorff_grid(A: Membership, B: Membership, grid: GridSpec) -> MetricEstimate:
    """Hausdorff distance between the cell centres classified inside each set."""
    a, b = grid.classify(A), grid.classify(B)
    return MetricEstimate(
        value=hausdorff_masks(a, b, grid),
        budget=grid.resolution**2,
        error_bound=grid.diagonal,
    )


def boundary_cells(mask: np.ndarray) -> np.ndarray:
    """Inside cells with at least one 4-neighbour outside; beyond the grid
    counts as outside."""
    padded = np.pad(mask, 1, constant_values=False)
    core = padded[1:-1, 1:-1]
    edge = (
        ~padded[:-2, 1:-1] | ~padded[2:, 1:-1] | ~padded[1:-1, :-2] | ~padded[1:-1, 2:]
    )
    return core & edge


def boundary_hausdorff_masks(a: np.ndarray, b: np.ndarray, grid: GridSpec) -> float:
    ba, bb = boundary_cells(a), boundary_cells(b)
    if not ba.any():
        raise ValueError("first set has an empty boundary on the grid")
    if not bb.any():
        raise ValueError("second set has an empty boundary on the grid")
    return hausdorff_masks(ba, bb, grid)


def boundary_hausdorff_grid(A: Membership, B: Membership, grid: GridSpec) -> MetricEstimate:
    a, b = grid.classify(A), grid.classify(B)
    return MetricEstimate(
        value=boundary_hausdorff_masks(a, b, grid),
        budget=grid.resolution**2,
        error_bound=grid.diagonal,
    )


def measure_diff_mc(
    A: Membership,
    B: Membership,
    frame: Frame,
    n_mc: int,
    rng: np.random.Generator,
) -> MetricEstimate:
    """Lebesgue measure of the symmetric difference of A and B inside ``frame``,
    from ``n_mc`` uniform points."""
    if n_mc < 100:
        raise ValueError("n_mc must be at least 100")
    pts = frame.uniform(rng, n_mc)
    disagree = np.asarray(A(pts), dtype=bool) != np.asarray(B(pts), dtype=bool)
    p = float(disagree.mean())
    return MetricEstimate(
        value=frame.area * p,
        budget=n_mc,
        standard_error=frame.area * math.sqrt(p * (1.0 - p) / n_mc),
    )
