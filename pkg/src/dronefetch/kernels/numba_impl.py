"""Numba-compiled grid kernels.

Same contracts as numpy_impl; hot loops are @njit with an array-backed
binary heap for A*. Import fails cleanly when numba is unavailable.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

SQRT2 = math.sqrt(2.0)


@njit(cache=True)
def _rasterize_loops(occ, x_min, y_min, delta, circles, rects):
    nx, ny = occ.shape
    for i in range(nx):
        x = x_min + (i + 0.5) * delta
        for j in range(ny):
            y = y_min + (j + 0.5) * delta
            for k in range(circles.shape[0]):
                dx = x - circles[k, 0]
                dy = y - circles[k, 1]
                if dx * dx + dy * dy < circles[k, 2] * circles[k, 2]:
                    occ[i, j] = 1
            for k in range(rects.shape[0]):
                if abs(x - rects[k, 0]) <= rects[k, 2] and abs(y - rects[k, 1]) <= rects[k, 3]:
                    occ[i, j] = 1
    return occ


def rasterize(occ, x_min, y_min, delta, circles, rects):
    circles = np.ascontiguousarray(np.asarray(circles, dtype=np.float64).reshape(-1, 3))
    rects = np.ascontiguousarray(np.asarray(rects, dtype=np.float64).reshape(-1, 4))
    return _rasterize_loops(occ, x_min, y_min, delta, circles, rects)


@njit(cache=True)
def _heap_less(hf, hh, hi, hj, a, b):
    if hf[a] != hf[b]:
        return hf[a] < hf[b]
    if hh[a] != hh[b]:
        return hh[a] < hh[b]
    if hi[a] != hi[b]:
        return hi[a] < hi[b]
    return hj[a] < hj[b]


@njit(cache=True)
def _astar_core(occ, si, sj, gi, gj):
    nx, ny = occ.shape
    ncell = nx * ny
    INF = 1e30
    g = np.full(ncell, INF)
    na = np.zeros(ncell, np.int64)
    nd = np.zeros(ncell, np.int64)
    parent = np.full(ncell, -1, np.int64)
    closed = np.zeros(ncell, np.uint8)

    cap = 16 * ncell + 16
    hf = np.empty(cap)
    hh = np.empty(cap)
    hi = np.empty(cap, np.int64)
    hj = np.empty(cap, np.int64)
    size = 0

    h0 = math.hypot(si - gi, sj - gj)
    g[si * ny + sj] = 0.0
    hf[0] = h0
    hh[0] = h0
    hi[0] = si
    hj[0] = sj
    size = 1

    di8 = np.array([-1, -1, -1, 0, 0, 1, 1, 1], np.int64)
    dj8 = np.array([-1, 0, 1, -1, 1, -1, 0, 1], np.int64)

    found = False
    while size > 0:
        # pop root
        fi, fj = hi[0], hj[0]
        size -= 1
        hf[0] = hf[size]
        hh[0] = hh[size]
        hi[0] = hi[size]
        hj[0] = hj[size]
        # sift down
        pos = 0
        while True:
            l = 2 * pos + 1
            r = l + 1
            best = pos
            if l < size and _heap_less(hf, hh, hi, hj, l, best):
                best = l
            if r < size and _heap_less(hf, hh, hi, hj, r, best):
                best = r
            if best == pos:
                break
            hf[pos], hf[best] = hf[best], hf[pos]
            hh[pos], hh[best] = hh[best], hh[pos]
            hi[pos], hi[best] = hi[best], hi[pos]
            hj[pos], hj[best] = hj[best], hj[pos]
            pos = best
        ci = fi * ny + fj
        if closed[ci]:
            continue
        closed[ci] = 1
        if fi == gi and fj == gj:
            found = True
            break
        gc = g[ci]
        for k in range(8):
            ii = fi + di8[k]
            jj = fj + dj8[k]
            if ii < 0 or ii >= nx or jj < 0 or jj >= ny:
                continue
            if occ[ii, jj]:
                continue
            diag = di8[k] != 0 and dj8[k] != 0
            if diag and (occ[fi + di8[k], fj] or occ[fi, fj + dj8[k]]):
                continue
            ng = gc + (SQRT2 if diag else 1.0)
            nidx = ii * ny + jj
            if ng < g[nidx]:
                g[nidx] = ng
                if diag:
                    na[nidx] = na[ci]
                    nd[nidx] = nd[ci] + 1
                else:
                    na[nidx] = na[ci] + 1
                    nd[nidx] = nd[ci]
                parent[nidx] = ci
                hv = math.hypot(ii - gi, jj - gj)
                if size >= cap:
                    break  # heap overflow; cannot happen with cap = 16 * ncells
                hf[size] = ng + hv
                hh[size] = hv
                hi[size] = ii
                hj[size] = jj
                # sift up
                pos = size
                size += 1
                while pos > 0:
                    par = (pos - 1) // 2
                    if _heap_less(hf, hh, hi, hj, pos, par):
                        hf[pos], hf[par] = hf[par], hf[pos]
                        hh[pos], hh[par] = hh[par], hh[pos]
                        hi[pos], hi[par] = hi[par], hi[pos]
                        hj[pos], hj[par] = hj[par], hj[pos]
                        pos = par
                    else:
                        break

    if not found:
        return np.empty((0, 2), np.int64), 0, 0, False
    gidx = gi * ny + gj
    # count path length
    n = 1
    c = gidx
    while parent[c] >= 0:
        c = parent[c]
        n += 1
    path = np.empty((n, 2), np.int64)
    c = gidx
    for k in range(n - 1, -1, -1):
        path[k, 0] = c // ny
        path[k, 1] = c % ny
        c = parent[c]
    return path, na[gidx], nd[gidx], True


def astar(occ, si, sj, gi, gj):
    path, n_axial, n_diag, ok = _astar_core(occ, si, sj, gi, gj)
    if not ok:
        return None, 0, 0
    return path, int(n_axial), int(n_diag)


@njit(cache=True)
def _los_core(occ, x_min, y_min, delta, x0, y0, x1, y1):
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
    if dx != 0.0:
        edge_x = x_min + (i + (1 if dx > 0 else 0)) * delta
        t_max_x = (edge_x - x0) / dx
        t_dx = delta / abs(dx)
    else:
        t_max_x = math.inf
        t_dx = math.inf
    if dy != 0.0:
        edge_y = y_min + (j + (1 if dy > 0 else 0)) * delta
        t_max_y = (edge_y - y0) / dy
        t_dy = delta / abs(dy)
    else:
        t_max_y = math.inf
        t_dy = math.inf
    while i != i1 or j != j1:
        # near-ties count as corner crossings (see numpy_impl)
        if t_max_x < t_max_y - 1e-12:
            i += step_i
            t_max_x += t_dx
        elif t_max_y < t_max_x - 1e-12:
            j += step_j
            t_max_y += t_dy
        else:
            if 0 <= i + step_i < nx and occ[i + step_i, j]:
                return False
            if 0 <= j + step_j < ny and occ[i, j + step_j]:
                return False
            i += step_i
            j += step_j
            t_max_x += t_dx
            t_max_y += t_dy
        if i < 0 or i >= nx or j < 0 or j >= ny:
            return False
        if occ[i, j]:
            return False
        if t_max_x > 1.0 + 1e-12 and t_max_y > 1.0 + 1e-12 and (i != i1 or j != j1):
            break
    return True


def line_of_sight(occ, x_min, y_min, delta, x0, y0, x1, y1):
    return bool(_los_core(occ, x_min, y_min, delta, x0, y0, x1, y1))


@njit(cache=True)
def _point_to_polyline_core(points, poly):
    n = points.shape[0]
    m = poly.shape[0]
    d = points.shape[1]
    out = np.empty(n)
    for p in range(n):
        best = math.inf
        if m == 1:
            s = 0.0
            for c in range(d):
                s += (points[p, c] - poly[0, c]) ** 2
            best = math.sqrt(s)
        for k in range(m - 1):
            denom = 0.0
            num = 0.0
            for c in range(d):
                ab = poly[k + 1, c] - poly[k, c]
                denom += ab * ab
                num += (points[p, c] - poly[k, c]) * ab
            t = 0.0 if denom == 0.0 else num / denom
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            s = 0.0
            for c in range(d):
                closest = poly[k, c] + t * (poly[k + 1, c] - poly[k, c])
                s += (points[p, c] - closest) ** 2
            dist = math.sqrt(s)
            if dist < best:
                best = dist
        out[p] = best
    return out


def point_to_polyline(points, polyline):
    points = np.ascontiguousarray(np.asarray(points, dtype=np.float64))
    poly = np.ascontiguousarray(np.asarray(polyline, dtype=np.float64))
    return _point_to_polyline_core(points, poly)


from .numpy_impl import min_dist_to_point  # noqa: E402  (cheap; no jit needed)
