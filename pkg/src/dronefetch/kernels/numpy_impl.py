"""Pure numpy/python implementations of the grid kernels.

Reference backend; the numba backend must agree with these on path cost,
occupancy, and visibility decisions.
"""

from __future__ import annotations

import heapq
import math

import numpy as np

SQRT2 = math.sqrt(2.0)

# 8-connected neighborhood: (di, dj, diagonal?)
_NEIGHBORS = [
    (-1, -1, True), (-1, 0, False), (-1, 1, True),
    (0, -1, False), (0, 1, False),
    (1, -1, True), (1, 0, False), (1, 1, True),
]


def rasterize(occ, x_min, y_min, delta, circles, rects):
    """Mark occupied cells in-place.

    circles: (k, 3) array of (cx, cy, r); a cell is occupied when its
    center lies strictly inside the circle. rects: (m, 4) array of
    (cx, cy, hx, hy) closed axis-aligned boxes.
    """
    nx, ny = occ.shape
    xs = x_min + (np.arange(nx) + 0.5) * delta
    ys = y_min + (np.arange(ny) + 0.5) * delta
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    for cx, cy, r in np.asarray(circles, dtype=float).reshape(-1, 3):
        occ[(gx - cx) ** 2 + (gy - cy) ** 2 < r * r] = 1
    for cx, cy, hx, hy in np.asarray(rects, dtype=float).reshape(-1, 4):
        occ[(np.abs(gx - cx) <= hx) & (np.abs(gy - cy) <= hy)] = 1
    return occ


def astar(occ, si, sj, gi, gj):
    """8-connected A* with unit/sqrt(2) step costs and Euclidean heuristic.

    Returns (path, n_axial, n_diag) where path is an (n, 2) int array of
    cells from start to goal, or (None, 0, 0) when unreachable. Diagonal
    moves through a blocked corner are forbidden. Ties in the open set
    break on lower f, then lower h, then lower (i, j).
    """
    nx, ny = occ.shape

    def h(i, j):
        return math.hypot(i - gi, j - gj)

    g = {(si, sj): 0.0}
    counts = {(si, sj): (0, 0)}
    parent = {}
    closed = set()
    heap = [(h(si, sj), h(si, sj), si, sj)]
    while heap:
        f, _, i, j = heapq.heappop(heap)
        if (i, j) in closed:
            continue
        closed.add((i, j))
        if (i, j) == (gi, gj):
            path = [(i, j)]
            while (i, j) in parent:
                i, j = parent[(i, j)]
                path.append((i, j))
            na, nd = counts[(gi, gj)]
            return np.array(path[::-1], dtype=np.int64), na, nd
        gc = g[(i, j)]
        for di, dj, diag in _NEIGHBORS:
            ni, nj = i + di, j + dj
            if not (0 <= ni < nx and 0 <= nj < ny) or occ[ni, nj]:
                continue
            if diag and (occ[i + di, j] or occ[i, j + dj]):
                continue  # no corner cutting
            ng = gc + (SQRT2 if diag else 1.0)
            if (ni, nj) not in g or ng < g[(ni, nj)]:
                g[(ni, nj)] = ng
                na, nd = counts[(i, j)]
                counts[(ni, nj)] = (na + (0 if diag else 1), nd + (1 if diag else 0))
                parent[(ni, nj)] = (i, j)
                hv = h(ni, nj)
                heapq.heappush(heap, (ng + hv, hv, ni, nj))
    return None, 0, 0


def line_of_sight(occ, x_min, y_min, delta, x0, y0, x1, y1):
    """True when the world-frame segment crosses no occupied cell.

    Conservative grid traversal: when the segment passes exactly through
    a cell corner, both corner-adjacent cells are treated as crossed.
    """
    nx, ny = occ.shape
    i0 = int((x0 - x_min) / delta)
    j0 = int((y0 - y_min) / delta)
    i1 = int((x1 - x_min) / delta)
    j1 = int((y1 - y_min) / delta)
    i0 = min(max(i0, 0), nx - 1)
    j0 = min(max(j0, 0), ny - 1)
    i1 = min(max(i1, 0), nx - 1)
    j1 = min(max(j1, 0), ny - 1)
    if occ[i0, j0] or occ[i1, j1]:
        return False
    dx = x1 - x0
    dy = y1 - y0
    i, j = i0, j0
    step_i = 1 if dx > 0 else -1
    step_j = 1 if dy > 0 else -1
    # Parametric distance to the next vertical / horizontal grid line.
    if dx != 0.0:
        next_x = x_min + (i + (1 if dx > 0 else 0)) * delta
        t_max_x = (next_x - x0) / dx
        t_dx = delta / abs(dx)
    else:
        t_max_x = math.inf
        t_dx = math.inf
    if dy != 0.0:
        next_y = y_min + (j + (1 if dy > 0 else 0)) * delta
        t_max_y = (next_y - y0) / dy
        t_dy = delta / abs(dy)
    else:
        t_max_y = math.inf
        t_dy = math.inf
    while (i, j) != (i1, j1):
        # Near-ties count as corner crossings so float rounding cannot
        # sneak the segment through a blocked corner.
        if t_max_x < t_max_y - 1e-12:
            i += step_i
            t_max_x += t_dx
        elif t_max_y < t_max_x - 1e-12:
            j += step_j
            t_max_y += t_dy
        else:
            # Corner crossing: both adjacent cells must be free.
            if 0 <= i + step_i < nx and occ[i + step_i, j]:
                return False
            if 0 <= j + step_j < ny and occ[i, j + step_j]:
                return False
            i += step_i
            j += step_j
            t_max_x += t_dx
            t_max_y += t_dy
        if not (0 <= i < nx and 0 <= j < ny):
            return False
        if occ[i, j]:
            return False
        if t_max_x > 1.0 + 1e-12 and t_max_y > 1.0 + 1e-12 and (i, j) != (i1, j1):
            # Numerical safety: segment exhausted without reaching the
            # end cell (endpoint on a boundary); remaining cells share
            # the endpoint, which is already known free.
            break
    return True


def point_to_polyline(points, polyline):
    """Min Euclidean distance from each point to a polyline.

    points: (n, d); polyline: (m, d) with m >= 1. Returns (n,) distances.
    """
    points = np.asarray(points, dtype=float)
    poly = np.asarray(polyline, dtype=float)
    if poly.shape[0] == 1:
        return np.linalg.norm(points - poly[0], axis=1)
    best = np.full(points.shape[0], np.inf)
    for k in range(poly.shape[0] - 1):
        a, b = poly[k], poly[k + 1]
        ab = b - a
        denom = float(ab @ ab)
        if denom == 0.0:
            d = np.linalg.norm(points - a, axis=1)
        else:
            t = np.clip((points - a) @ ab / denom, 0.0, 1.0)
            d = np.linalg.norm(points - (a + t[:, None] * ab), axis=1)
        best = np.minimum(best, d)
    return best


def min_dist_to_point(traj_xy, cx, cy):
    """Min distance from a 2D polyline (the trajectory) to a point.

    Exact point-to-segment distances, so sampling density of the
    trajectory does not matter.
    """
    traj = np.asarray(traj_xy, dtype=float)
    if traj.shape[0] == 0:
        return math.inf
    if traj.shape[0] == 1:
        return math.hypot(traj[0, 0] - cx, traj[0, 1] - cy)
    p = np.array([cx, cy])
    a = traj[:-1]
    ab = traj[1:] - a
    denom = np.einsum("ij,ij->i", ab, ab)
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(denom > 0, np.einsum("ij,ij->i", p - a, ab) / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = a + t[:, None] * ab
    return float(np.min(np.linalg.norm(closest - p, axis=1)))
