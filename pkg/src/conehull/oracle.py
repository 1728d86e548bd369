"""Brute-force certification.

:func:`separation_oracle` looks for an explicit cone that contains a query
point and misses the sample, which proves the query lies outside the
cone-convex hull by complement. :func:`build_unavoidable_family` and
:func:`check_unavoidability` test the finite cone family used in the
mean-rate argument: every rho,h-cone through a point must contain one member.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .geometry import (
    TWO_PI,
    FiniteCone,
    Point,
    UnitVector,
    cone_contains_many,
    derived_params,
)

# Index-space slack used by the vectorised prefilter; every hit is then
# re-verified with the exact predicate.
_EPS = 1e-9


@dataclass(frozen=True)
class SeparationCertificate:
    cone: FiniteCone | None
    vertex_grid_step: float
    axis_count: int

    @property
    def found(self) -> bool:
        return self.cone is not None


def _vertex_offsets(step: float, h: float) -> np.ndarray:
    """Integer offsets (i, j) with 0 < step*|(i, j)| < h, nearest first, ties
    broken by angle."""
    m = int(math.floor(h / step))
    i, j = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1))
    i, j = i.ravel(), j.ravel()
    d2 = i * i + j * j
    r = step * np.sqrt(d2)
    keep = (d2 > 0) & (r < h)
    i, j, d2 = i[keep], j[keep], d2[keep]
    order = np.lexsort((np.arctan2(j, i), d2))
    return np.column_stack((i[order], j[order]))


def _interval_counts(lo: np.ndarray, hi: np.ndarray, rows: np.ndarray, n_rows: int, k: int) -> np.ndarray:
    """Per-row coverage counts of cyclic integer intervals [lo, hi] over 0..k-1."""
    diff = np.zeros((n_rows, k + 1), dtype=np.int32)
    width = hi - lo + 1
    full = width >= k
    if full.any():
        np.add.at(diff, (rows[full], 0), 1)
        np.add.at(diff, (rows[full], k), -1)
    part = ~full & (width > 0)
    lo_m = np.mod(lo[part], k)
    hi_m = np.mod(hi[part], k)
    r = rows[part]
    np.add.at(diff, (r, lo_m), 1)
    np.add.at(diff, (r, hi_m + 1), -1)
    wrap = lo_m > hi_m
    np.add.at(diff, (r[wrap], 0), 1)
    np.add.at(diff, (r[wrap], k), -1)
    return np.cumsum(diff[:, :k], axis=1)


def separation_oracle(
    sample,
    query,
    rho: float,
    h: float,
    vertex_grid_step: float,
    axis_count: int,
    batch: int = 256,
) -> SeparationCertificate:
    """First rho,h-cone (vertices on a grid anchored at ``query``, nearest
    first; axes at multiples of 2*pi/axis_count) that contains ``query`` and
    no sample point. A miss proves nothing."""
    if not vertex_grid_step > 0:
        raise ValueError("vertex_grid_step must be positive")
    if axis_count < 8:
        raise ValueError("axis_count must be at least 8")
    pts = np.asarray(sample, dtype=float).reshape(-1, 2)
    q = np.asarray(query.as_array() if isinstance(query, Point) else query, dtype=float).reshape(2)
    none = SeparationCertificate(None, vertex_grid_step, axis_count)

    offsets = _vertex_offsets(vertex_grid_step, h)
    near = pts[np.sum((pts - q) ** 2, axis=1) < 4.0 * h * h]
    k = axis_count
    scale = k / TWO_PI
    half = rho / 2.0
    axes = [UnitVector.from_angle(TWO_PI * a / k) for a in range(k)]

    for b0 in range(0, len(offsets), batch):
        verts = q + vertex_grid_step * offsets[b0 : b0 + batch]
        nb = verts.shape[0]
        rows = np.arange(nb)

        dq = q - verts
        psi = np.arctan2(dq[:, 1], dq[:, 0])
        q_lo = np.floor((psi - half) * scale + _EPS).astype(np.int64) + 1
        q_hi = np.ceil((psi + half) * scale - _EPS).astype(np.int64) - 1
        allowed = _interval_counts(q_lo, q_hi, rows, nb, k) > 0

        if near.shape[0]:
            d = near[None, :, :] - verts[:, None, :]
            r2 = np.sum(d * d, axis=2)
            hit = (r2 > 0.0) & (r2 < h * h)
            bi, pj = np.nonzero(hit)
            phi = np.arctan2(d[bi, pj, 1], d[bi, pj, 0])
            p_lo = np.floor((phi - half) * scale - _EPS).astype(np.int64) + 1
            p_hi = np.ceil((phi + half) * scale + _EPS).astype(np.int64) - 1
            blocked = _interval_counts(p_lo, p_hi, bi, nb, k) > 0
            valid = allowed & ~blocked
        else:
            valid = allowed

        for bidx in np.flatnonzero(valid.any(axis=1)):
            v = Point(float(verts[bidx, 0]), float(verts[bidx, 1]))
            for a in np.flatnonzero(valid[bidx]):
                cone = FiniteCone(v, axes[a], rho, h)
                if not cone_contains_many(cone, q)[0]:
                    continue
                if pts.shape[0] and cone_contains_many(cone, pts).any():
                    continue
                return SeparationCertificate(cone, vertex_grid_step, axis_count)
    return none


@dataclass(frozen=True)
class UnavoidableFamily:
    center: Point
    members: tuple[FiniteCone, ...]
    gamma: float
    h_one: float

    @property
    def cardinality(self) -> int:
        return len(self.members)


def build_unavoidable_family(x, rho: float, h: float) -> UnavoidableFamily:
    """Cones of opening gamma/2 and height h1 at ``x`` with axes spaced
    2*pi/k apart, k = ceil(4*pi/gamma); their closures cover the closed disk
    of radius h1 about ``x``."""
    p = derived_params(rho, h)
    if p.gamma <= 0.0:
        raise ValueError(
            f"gamma = {p.gamma} at rho = {rho}: cones of opening gamma/2 are empty "
            "and no finite family exists"
        )
    center = x if isinstance(x, Point) else Point(float(x[0]), float(x[1]))
    k = math.ceil(4.0 * math.pi / p.gamma)
    members = tuple(
        FiniteCone(center, UnitVector.from_angle(TWO_PI * j / k), p.gamma / 2.0, p.h_one)
        for j in range(k)
    )
    return UnavoidableFamily(center, members, p.gamma, p.h_one)


def member_template(family: UnavoidableFamily, n_points: int = 1000) -> np.ndarray:
    """Low-discrepancy points strictly inside a member cone with axis (1, 0)
    and vertex at the origin."""
    t = qmc.Halton(d=2, scramble=False).random(n_points + 1)[1:]
    r = family.h_one * np.sqrt(t[:, 0])
    a = (t[:, 1] - 0.5) * (family.gamma / 2.0)
    return np.column_stack((r * np.cos(a), r * np.sin(a)))


def _member_points(family: UnavoidableFamily, template: np.ndarray) -> np.ndarray:
    cx, cy = family.center.x, family.center.y
    out = np.empty((family.cardinality, template.shape[0], 2))
    for j, m in enumerate(family.members):
        ux, uy = m.axis.ux, m.axis.uy
        out[j, :, 0] = cx + ux * template[:, 0] - uy * template[:, 1]
        out[j, :, 1] = cy + uy * template[:, 0] + ux * template[:, 1]
    return out


def contained_member(
    family: UnavoidableFamily, cone: FiniteCone, member_pts: np.ndarray | None = None, screen: int = 64
) -> int | None:
    """Index of the first member all of whose test points lie in ``cone``."""
    if member_pts is None:
        member_pts = _member_points(family, member_template(family))
    k, m, _ = member_pts.shape
    head = cone_contains_many(cone, member_pts[:, :screen].reshape(-1, 2)).reshape(k, -1)
    for j in np.flatnonzero(head.all(axis=1)):
        if cone_contains_many(cone, member_pts[j]).all():
            return int(j)
    return None


def random_cone_through(x: Point, rho: float, h: float, rng: np.random.Generator) -> FiniteCone:
    """A rho,h-cone containing ``x``: ``x`` sits uniformly (by area) inside the
    cone, and the cone's orientation is uniform."""
    while True:
        r = h * math.sqrt(rng.random())
        beta = rng.uniform(-rho / 2.0, rho / 2.0)
        alpha = rng.uniform(0.0, TWO_PI)
        ux, uy = r * math.cos(beta), r * math.sin(beta)
        ca, sa = math.cos(alpha), math.sin(alpha)
        vx = x.x - (ca * ux - sa * uy)
        vy = x.y - (sa * ux + ca * uy)
        cone = FiniteCone(Point(vx, vy), UnitVector.from_angle(alpha), rho, h)
        if cone_contains_many(cone, x)[0]:
            return cone


def check_unavoidability(
    family: UnavoidableFamily,
    rho: float,
    h: float,
    trials: int,
    rng: np.random.Generator,
    n_points: int = 1000,
) -> float:
    """Fraction of random cones through the family's centre that contain some
    member, containment judged on ``n_points`` quasi-random member points."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    pts = _member_points(family, member_template(family, n_points))
    hits = 0
    for _ in range(trials):
        cone = random_cone_through(family.center, rho, h, rng)
        if contained_member(family, cone, pts) is not None:
            hits += 1
    return hits / trials


def erased_points(region, n: int, rng: np.random.Generator, max_proposals: int = 10**7) -> np.ndarray:
    """``n`` uniform points of the frame that ``region`` has erased."""
    chunks, have, proposed = [], 0, 0
    while have < n:
        if proposed >= max_proposals:
            raise RuntimeError("erased area too small to sample")
        cand = region.frame.uniform(rng, max(1024, 4 * (n - have)))
        proposed += cand.shape[0]
        keep = cand[~region.contains_many(cand)]
        chunks.append(keep)
        have += keep.shape[0]
    return np.concatenate(chunks)[:n]


def certificate_coverage(
    sample,
    queries: np.ndarray,
    rho: float,
    h: float,
    vertex_grid_step: float,
    axis_count: int,
) -> tuple[float, list[int]]:
    """Fraction of ``queries`` that receive a certificate, and the indices
    of those that do not."""
    misses = [
        i for i, q in enumerate(np.asarray(queries, dtype=float).reshape(-1, 2))
        if not separation_oracle(sample, q, rho, h, vertex_grid_step, axis_count).found
    ]
    n = len(queries)
    return (n - len(misses)) / n, misses
