"""Compiled inner loops. Each predicate mirrors its numpy twin in
:mod:`conehull.geometry` operation for operation, so both paths classify
points identically."""

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True, nogil=True)
def empty_cones(px, py, vx, vy, ax, ay, cos_half, h2):
    """Mask of candidate cones (vertex v, axis a) holding no sample point."""
    m = vx.shape[0]
    n = px.shape[0]
    out = np.ones(m, dtype=np.bool_)
    for i in range(m):
        for j in range(n):
            dx = px[j] - vx[i]
            dy = py[j] - vy[i]
            r2 = dx * dx + dy * dy
            if r2 > 0.0 and r2 < h2:
                if ax[i] * dx + ay[i] * dy > cos_half * math.sqrt(r2):
                    out[i] = False
                    break
    return out


@njit(cache=True, nogil=True)
def empty_disks(px, py, cx, cy, r2max):
    """Mask of candidate open disks holding no sample point (centre included)."""
    m = cx.shape[0]
    n = px.shape[0]
    out = np.ones(m, dtype=np.bool_)
    for i in range(m):
        for j in range(n):
            dx = px[j] - cx[i]
            dy = py[j] - cy[i]
            if dx * dx + dy * dy < r2max:
                out[i] = False
                break
    return out


@njit(cache=True, nogil=True)
def sweep_gaps(px, py, vx, vy, ax, ay, half, h2):
    """Smallest clockwise and counterclockwise clearances between the seed
    cone's flanks and the sample points within reach; inf when none."""
    cw = np.inf
    ccw = np.inf
    for j in range(px.shape[0]):
        dx = px[j] - vx
        dy = py[j] - vy
        r2 = dx * dx + dy * dy
        if not (r2 > 0.0 and r2 < h2):
            continue
        phi = math.atan2(ax * dy - ay * dx, ax * dx + ay * dy)
        if phi == -math.pi:
            phi = math.pi
        if phi < 0.0:
            g = -phi - half
            if g < cw:
                cw = g
        elif phi > 0.0:
            g = phi - half
            if g < ccw:
                ccw = g
    return cw, ccw


@njit(cache=True, nogil=True)
def in_sector(x, y, vx, vy, span, rad2, sx, sy, ex, ey):
    dx = x - vx
    dy = y - vy
    r2 = dx * dx + dy * dy
    if not (r2 > 0.0 and r2 < rad2):
        return False
    if span >= TWO_PI:
        return True
    if span == 0.0:
        return sx * dy - sy * dx == 0.0 and sx * dx + sy * dy > 0.0
    if span <= math.pi:
        return sx * dy - sy * dx >= 0.0 and dx * ey - dy * ex >= 0.0
    return not (ex * dy - ey * dx > 0.0 and dx * sy - dy * sx > 0.0)


@njit(cache=True, nogil=True)
def build_index(x0, y0, cw, ch, g, bx0, bx1, by0, by1, vx, vy, rad2):
    """CSR buckets over a g x g grid: sector s goes in every cell its bounding
    box touches whose rectangle comes within its radius of the vertex."""
    m = vx.shape[0]
    counts = np.zeros(g * g, dtype=np.int64)
    for pass_ in range(2):
        if pass_ == 1:
            ptr = np.zeros(g * g + 1, dtype=np.int64)
            for c in range(g * g):
                ptr[c + 1] = ptr[c] + counts[c]
            ids = np.empty(ptr[g * g], dtype=np.int64)
            fill = ptr[:-1].copy()
        for s in range(m):
            i0 = max(0, int(math.floor((bx0[s] - x0) / cw)))
            i1 = min(g - 1, int(math.floor((bx1[s] - x0) / cw)))
            j0 = max(0, int(math.floor((by0[s] - y0) / ch)))
            j1 = min(g - 1, int(math.floor((by1[s] - y0) / ch)))
            for j in range(j0, j1 + 1):
                cy0 = y0 + j * ch
                ny = min(max(vy[s], cy0), cy0 + ch) - vy[s]
                for i in range(i0, i1 + 1):
                    cx0 = x0 + i * cw
                    nx = min(max(vx[s], cx0), cx0 + cw) - vx[s]
                    # generous slack: rounding must never drop a true overlap
                    if nx * nx + ny * ny > rad2[s] * (1.0 + 1e-9):
                        continue
                    c = j * g + i
                    if pass_ == 0:
                        counts[c] += 1
                    else:
                        ids[fill[c]] = s
                        fill[c] += 1
    return ptr, ids


@njit(cache=True, nogil=True)
def region_contains(
    px, py, x0, x1, y0, y1, g, cell_ptr, cell_ids, vx, vy, span, rad2, sx, sy, ex, ey
):
    """Membership in frame minus sectors, sectors looked up through the grid."""
    m = px.shape[0]
    out = np.zeros(m, dtype=np.bool_)
    cw = (x1 - x0) / g
    ch = (y1 - y0) / g
    for i in range(m):
        x = px[i]
        y = py[i]
        if not (x >= x0 and x <= x1 and y >= y0 and y <= y1):
            continue
        cx = min(g - 1, max(0, int(math.floor((x - x0) / cw))))
        cy = min(g - 1, max(0, int(math.floor((y - y0) / ch))))
        cell = cy * g + cx
        alive = True
        for k in range(cell_ptr[cell], cell_ptr[cell + 1]):
            s = cell_ids[k]
            if in_sector(x, y, vx[s], vy[s], span[s], rad2[s], sx[s], sy[s], ex[s], ey[s]):
                alive = False
                break
        out[i] = alive
    return out
