"""Trajectory-error and safety metrics.

Per-leg deviations are point-to-polyline distances between the achieved
trajectory samples and the smoothed reference path; aggregates report
max / mean Euclidean error / RMSE, plus minimum human clearance over
the navigation legs and gripper-event correctness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels


class EmptyLogError(ValueError):
    """Metrics requested for a log with no trajectory samples."""


@dataclass(frozen=True)
class LegMetrics:
    name: str
    max_error: float
    mean_error: float
    rmse: float
    samples: int


@dataclass
class MetricsReport:
    legs: list[LegMetrics]
    max_error: float
    mean_error: float
    rmse: float
    min_human_clearance: float
    duration: float
    gripper_events_ok: bool
    outcome: str

    def to_dict(self) -> dict:
        return {
            "legs": [
                {
                    "name": l.name,
                    "max_error": l.max_error,
                    "mean_error": l.mean_error,
                    "rmse": l.rmse,
                    "samples": l.samples,
                }
                for l in self.legs
            ],
            "max_error": self.max_error,
            "mean_error": self.mean_error,
            "rmse": self.rmse,
            "min_human_clearance": self.min_human_clearance,
            "duration": self.duration,
            "gripper_events_ok": self.gripper_events_ok,
            "outcome": self.outcome,
        }


def trajectory_errors(achieved: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Distance from each achieved sample to the reference polyline."""
    achieved = np.asarray(achieved, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if achieved.size == 0:
        raise EmptyLogError("no trajectory samples")
    return kernels.point_to_polyline(achieved, reference)


def error_stats(errors: np.ndarray) -> tuple[float, float, float]:
    """(max, mean, rmse) of a non-empty error sample."""
    errors = np.asarray(errors, dtype=float)
    if errors.size == 0:
        raise EmptyLogError("no error samples")
    return (
        float(np.max(errors)),
        float(np.mean(errors)),
        float(math.sqrt(float(np.mean(errors * errors)))),
    )


def leg_metrics(name: str, achieved: np.ndarray, reference: np.ndarray) -> LegMetrics:
    errs = trajectory_errors(achieved, reference)
    mx, mean, rmse = error_stats(errs)
    return LegMetrics(name=name, max_error=mx, mean_error=mean, rmse=rmse, samples=int(errs.size))


def min_clearance(traj_xy: np.ndarray, human_xy) -> float:
    """Exact min distance from the (densified) trajectory polyline to
    the human center, horizontal."""
    return kernels.min_dist_to_point(np.asarray(traj_xy, dtype=float), float(human_xy[0]), float(human_xy[1]))


def compute_metrics(log) -> MetricsReport:
    """Metrics for a completed MissionLog (see mission module)."""
    if not log.records:
        raise EmptyLogError("mission log holds no tick records")
    legs = []
    all_errors = []
    for leg in log.legs:
        if len(leg.achieved) == 0:
            continue
        lm = leg_metrics(leg.name, np.asarray(leg.achieved), np.asarray(leg.reference))
        legs.append(lm)
        all_errors.append(trajectory_errors(np.asarray(leg.achieved), np.asarray(leg.reference)))
    if all_errors:
        mx, mean, rmse = error_stats(np.concatenate(all_errors))
    else:
        mx = mean = rmse = 0.0
    nav_xy = np.array(
        [[r.x, r.y] for r in log.records if r.state in log.NAVIGATION_STATES],
        dtype=float,
    )
    clearance = min_clearance(nav_xy, log.human_center) if nav_xy.size else math.inf
    return MetricsReport(
        legs=legs,
        max_error=mx,
        mean_error=mean,
        rmse=rmse,
        min_human_clearance=clearance,
        duration=log.records[-1].t,
        gripper_events_ok=log.gripper_sequence_ok(),
        outcome=log.outcome_str(),
    )


def aggregate_reports(reports: list[MetricsReport]) -> dict:
    """Batch aggregate: per-trial rows plus a pooled summary row."""
    if not reports:
        raise EmptyLogError("no reports to aggregate")
    rows = [r.to_dict() for r in reports]
    return {
        "trials": rows,
        "aggregate": {
            "n": len(reports),
            "max_error": max(r.max_error for r in reports),
            "mean_error": float(np.mean([r.mean_error for r in reports])),
            "rmse": float(np.sqrt(np.mean([r.rmse**2 for r in reports]))),
            "min_human_clearance": min(r.min_human_clearance for r in reports),
            "successes": sum(1 for r in reports if r.outcome == "success"),
        },
    }
