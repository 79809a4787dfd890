"""Serialization of mission logs: JSON report, CSV trajectory, SVG
top-down plot, and planner debug dumps (PGM grid + waypoint CSV).

All writers are bit-for-bit reproducible for identical inputs: floats
are emitted via repr (JSON) or a fixed format (CSV/SVG), and key order
is stable.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .metrics import MetricsReport
from .planner import OccupancyGrid, PlannedPath
from .scene import Scene


def write_report_json(path: str, log, metrics: MetricsReport, meta: dict) -> None:
    """Top-level keys: meta, outcome, failure_mode, events, metrics."""
    doc = {
        "meta": meta,
        "outcome": log.outcome_str(),
        "failure_mode": log.failure_mode,
        "events": [{"t": e.t, "kind": e.kind, "data": e.data} for e in log.events],
        "metrics": metrics.to_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_trajectory_csv(path: str, log) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t,x,y,z,yaw,state,gripper\n")
        for r in log.records:
            fh.write(f"{r.t:.6f},{r.x:.6f},{r.y:.6f},{r.z:.6f},{r.yaw:.6f},{r.state},{r.gripper}\n")


def write_waypoints_csv(path: str, planned: PlannedPath) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y\n")
        for x, y in planned.waypoints:
            fh.write(f"{x:.6f},{y:.6f}\n")


def write_grid_pgm(path: str, grid: OccupancyGrid) -> None:
    """Plain-text portable graymap; occupied cells black. Rows run from
    y_max down to y_min, columns from x_min to x_max."""
    nx, ny = grid.shape
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"P2\n{nx} {ny}\n255\n")
        for j in range(ny - 1, -1, -1):
            fh.write(" ".join("0" if grid.occ[i, j] else "255" for i in range(nx)) + "\n")


class _SvgCanvas:
    """Minimal deterministic SVG builder; world meters -> pixels."""

    def __init__(self, bounds, scale: float = 100.0, margin: float = 20.0):
        self.x_min, self.x_max, self.y_min, self.y_max = bounds
        self.scale = scale
        self.margin = margin
        self.width = (self.x_max - self.x_min) * scale + 2 * margin
        self.height = (self.y_max - self.y_min) * scale + 2 * margin
        self.parts: list[str] = []

    def px(self, x: float, y: float) -> tuple[float, float]:
        # y grows upward in the world, downward in SVG
        return (
            self.margin + (x - self.x_min) * self.scale,
            self.margin + (self.y_max - y) * self.scale,
        )

    def rect(self, cx, cy, hx, hy, style):
        x0, y0 = self.px(cx - hx, cy + hy)
        self.parts.append(
            f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{2 * hx * self.scale:.2f}" '
            f'height="{2 * hy * self.scale:.2f}" style="{style}"/>'
        )

    def circle(self, cx, cy, r, style):
        x, y = self.px(cx, cy)
        self.parts.append(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{r * self.scale:.2f}" style="{style}"/>')

    def polyline(self, pts, style):
        if len(pts) == 0:
            return
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in (self.px(p[0], p[1]) for p in pts))
        self.parts.append(f'<polyline points="{coords}" style="{style}"/>')

    def text(self, x, y, s, style="font-size:12px;fill:#333"):
        px, py = self.px(x, y)
        self.parts.append(f'<text x="{px:.2f}" y="{py:.2f}" style="{style}">{s}</text>')

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width:.0f}" '
            f'height="{self.height:.0f}" viewBox="0 0 {self.width:.0f} {self.height:.0f}">\n'
            f'<rect x="0" y="0" width="{self.width:.0f}" height="{self.height:.0f}" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )


def _draw_scene(canvas: _SvgCanvas, scene: Scene, human_ring: float) -> None:
    canvas.rect(
        0.5 * (scene.bounds[0] + scene.bounds[1]),
        0.5 * (scene.bounds[2] + scene.bounds[3]),
        0.5 * (scene.bounds[1] - scene.bounds[0]),
        0.5 * (scene.bounds[3] - scene.bounds[2]),
        "fill:none;stroke:#000;stroke-width:2",
    )
    canvas.rect(
        float(scene.table.center[0]),
        float(scene.table.center[1]),
        float(scene.table.half_extents[0]),
        float(scene.table.half_extents[1]),
        "fill:#d2b48c;stroke:#8b5a2b;stroke-width:1",
    )
    for o in scene.objects:
        canvas.circle(float(o.position[0]), float(o.position[1]), max(o.radius, 0.03), "fill:#555;stroke:none")
    hx, hy = float(scene.human.center[0]), float(scene.human.center[1])
    canvas.circle(hx, hy, scene.human.body_radius, "fill:#e88;stroke:#a00;stroke-width:1")
    canvas.circle(hx, hy, human_ring, "fill:none;stroke:#a00;stroke-width:1;stroke-dasharray:6 4")
    canvas.circle(
        float(scene.drone_home.position[0]),
        float(scene.drone_home.position[1]),
        0.08,
        "fill:#36c;stroke:none",
    )


def write_mission_svg(path: str, scene: Scene, log, human_ring: float) -> None:
    """Top-down view: room, table, human + margin ring, reference paths,
    achieved trajectory."""
    canvas = _SvgCanvas(scene.bounds)
    _draw_scene(canvas, scene, human_ring)
    for leg in log.legs:
        canvas.polyline(leg.reference, "fill:none;stroke:#2a2;stroke-width:2;stroke-dasharray:8 4")
    traj = [(r.x, r.y) for r in log.records]
    canvas.polyline(traj, "fill:none;stroke:#36c;stroke-width:1.5")
    canvas.text(scene.bounds[0] + 0.1, scene.bounds[3] - 0.15, f"outcome: {log.outcome_str()}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canvas.render())


def write_plan_svg(path: str, scene: Scene, planned: PlannedPath, human_ring: float) -> None:
    canvas = _SvgCanvas(scene.bounds)
    _draw_scene(canvas, scene, human_ring)
    canvas.polyline(planned.waypoints, "fill:none;stroke:#2a2;stroke-width:2")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canvas.render())


def write_aggregate_json(path: str, aggregate: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(aggregate, fh, indent=2, sort_keys=True)
        fh.write("\n")


def ensure_dir(path: str) -> None:
    os.makedirs(path, exist_ok=True)
