"""Human-aware global planning on a horizontal occupancy grid.

Pipeline per leg: rasterize obstacles -> project endpoints to nearest
free cells -> 8-connected A* -> convert to world coordinates ->
line-of-sight smoothing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .kernels import SQRT2


class PlanningError(Exception):
    """Base class for planner failures."""


class InvalidEndpointError(PlanningError):
    """Start or goal cell is occupied."""


class NoPathError(PlanningError):
    """Goal unreachable on the grid."""


class NoFreeCellError(PlanningError):
    """Grid has no free cell to project onto."""


@dataclass(frozen=True)
class CircularObstacle:
    cx: float
    cy: float
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("obstacle radius must be positive")


@dataclass(frozen=True)
class RectObstacle:
    """Closed axis-aligned box given by center and half-extents."""

    cx: float
    cy: float
    half_x: float
    half_y: float


@dataclass
class OccupancyGrid:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    delta: float
    occ: np.ndarray = field(default=None)  # (nx, ny) uint8, 1 = occupied

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("resolution must be positive")
        if self.x_max <= self.x_min or self.y_max <= self.y_min:
            raise ValueError("degenerate bounds")
        nx = math.ceil((self.x_max - self.x_min) / self.delta)
        ny = math.ceil((self.y_max - self.y_min) / self.delta)
        if self.occ is None:
            self.occ = np.zeros((nx, ny), dtype=np.uint8)
        elif self.occ.shape != (nx, ny):
            raise ValueError("occupancy array shape does not match bounds/resolution")

    @property
    def shape(self) -> tuple[int, int]:
        return self.occ.shape

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return (self.x_min + (i + 0.5) * self.delta, self.y_min + (j + 0.5) * self.delta)

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        nx, ny = self.occ.shape
        i = int(math.floor((x - self.x_min) / self.delta))
        j = int(math.floor((y - self.y_min) / self.delta))
        return min(max(i, 0), nx - 1), min(max(j, 0), ny - 1)

    def is_free(self, i: int, j: int) -> bool:
        return self.occ[i, j] == 0


@dataclass(frozen=True)
class PlannedPath:
    """World-frame waypoints plus the raw A* path cost in meters."""

    waypoints: np.ndarray  # (n, 2)
    cost: float

    def length(self) -> float:
        if self.waypoints.shape[0] < 2:
            return 0.0
        return float(np.sum(np.linalg.norm(np.diff(self.waypoints, axis=0), axis=1)))


def rasterize(bounds, delta, obstacles=(), rects=()) -> OccupancyGrid:
    """Build an occupancy grid; cells occupied when their center lies
    strictly inside a circle or inside a (closed) rectangle."""
    x_min, x_max, y_min, y_max = bounds
    grid = OccupancyGrid(x_min, x_max, y_min, y_max, delta)
    circles = np.array([[o.cx, o.cy, o.radius] for o in obstacles], dtype=float).reshape(-1, 3)
    boxes = np.array([[r.cx, r.cy, r.half_x, r.half_y] for r in rects], dtype=float).reshape(-1, 4)
    kernels.rasterize(grid.occ, x_min, y_min, delta, circles, boxes)
    return grid


def astar(grid: OccupancyGrid, start_cell, goal_cell):
    """Minimum-cost 8-connected cell path; cost canonically
    n_axial + n_diag * sqrt(2) (in cells)."""
    si, sj = start_cell
    gi, gj = goal_cell
    if not grid.is_free(si, sj):
        raise InvalidEndpointError(f"start cell {start_cell} occupied")
    if not grid.is_free(gi, gj):
        raise InvalidEndpointError(f"goal cell {goal_cell} occupied")
    path, n_axial, n_diag = kernels.astar(grid.occ, si, sj, gi, gj)
    if path is None:
        raise NoPathError(f"no path from {start_cell} to {goal_cell}")
    cost = n_axial + n_diag * SQRT2
    return [(int(i), int(j)) for i, j in path], cost


def project_to_free(grid: OccupancyGrid, p) -> tuple[int, int]:
    """Free cell whose center is nearest to p; ties break on lowest
    (i, then j)."""
    free_i, free_j = np.nonzero(grid.occ == 0)
    if free_i.size == 0:
        raise NoFreeCellError("grid fully occupied")
    cx = grid.x_min + (free_i + 0.5) * grid.delta
    cy = grid.y_min + (free_j + 0.5) * grid.delta
    d2 = (cx - p[0]) ** 2 + (cy - p[1]) ** 2
    # nonzero() yields ascending (i, j), so among (near-)ties the first
    # candidate is the lowest (i, j); the epsilon absorbs float rounding
    # between symmetric cells.
    k = int(np.argmin(d2))
    candidates = np.nonzero(d2 <= d2[k] + 1e-9 * grid.delta**2)[0]
    k = int(candidates[0])
    return int(free_i[k]), int(free_j[k])


def segment_free(grid: OccupancyGrid, a, b) -> bool:
    """Line-of-sight test between two world points."""
    return kernels.line_of_sight(grid.occ, grid.x_min, grid.y_min, grid.delta, a[0], a[1], b[0], b[1])


def smooth(path: PlannedPath, grid: OccupancyGrid) -> PlannedPath:
    """Greedy forward line-of-sight smoothing.

    Keeps a subsequence of the input waypoints; every output segment is
    collision-free and total length never increases.
    """
    wp = path.waypoints
    n = wp.shape[0]
    if n <= 2:
        return path
    keep = [0]
    a = 0
    while a < n - 1:
        b = a + 1
        while b + 1 < n and segment_free(grid, wp[a], wp[b + 1]):
            b += 1
        keep.append(b)
        a = b
    return PlannedPath(waypoints=wp[np.array(keep)], cost=path.cost)


def cells_to_world(grid: OccupancyGrid, cells) -> np.ndarray:
    return np.array([grid.cell_center(i, j) for i, j in cells], dtype=float)


def plan_leg(grid: OccupancyGrid, start, goal) -> PlannedPath:
    """Full leg: project endpoints, A*, convert to world, smooth."""
    s = project_to_free(grid, start)
    g = project_to_free(grid, goal)
    cells, cost = astar(grid, s, g)
    raw = PlannedPath(waypoints=cells_to_world(grid, cells), cost=cost * grid.delta)
    return smooth(raw, grid)
