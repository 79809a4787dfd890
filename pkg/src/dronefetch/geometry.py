"""Frames, rigid transforms, pinhole camera model, and deprojection.

Conventions (used throughout the package):

- World frame: x/y horizontal, z up.
- Body frame: x forward, y left, z up; the drone carries only a yaw
  rotation relative to the world.
- Camera frame: x right, y down, z forward (standard pinhole). A
  forward-looking mount maps camera z -> body x, camera x -> body -y,
  camera y -> body -z.
- Depth is the camera-frame z coordinate (plane depth), not ray length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi


class InvalidDepthError(ValueError):
    """Depth query with a non-positive depth value."""


class OutOfBoundsError(ValueError):
    """Pixel coordinate outside the image."""


class BehindCameraError(ValueError):
    """Projection of a point with non-positive camera-frame z."""


def wrap_angle(angle: float) -> float:
    """Normalize an angle into (-pi, pi]."""
    a = math.remainder(angle, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


def vec3(x: float, y: float, z: float) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


@dataclass(frozen=True)
class Pose:
    """Position plus yaw in the world frame."""

    position: np.ndarray
    yaw: float

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        if not np.all(np.isfinite(self.position)) or not math.isfinite(self.yaw):
            raise ValueError("pose must be finite")
        object.__setattr__(self, "yaw", wrap_angle(self.yaw))


def yaw_matrix(yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class RigidTransform:
    """Rotation + translation; maps points from one frame into another."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rotation", np.asarray(self.rotation, dtype=float))
        object.__setattr__(self, "translation", np.asarray(self.translation, dtype=float))

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))

    @staticmethod
    def from_yaw(yaw: float, translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        return RigidTransform(yaw_matrix(yaw), np.asarray(translation, dtype=float))

    def apply(self, p: np.ndarray) -> np.ndarray:
        return self.rotation @ np.asarray(p, dtype=float) + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """self o other: apply `other` first, then `self`."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)


# Camera axes expressed in body axes: cam z -> body x, cam x -> body -y,
# cam y -> body -z.
CAMERA_TO_BODY = np.array(
    [
        [0.0, 0.0, 1.0],
        [-1.0, 0.0, 0.0],
        [0.0, -1.0, 0.0],
    ]
)


def forward_mount(offset=(0.0, 0.0, 0.0)) -> RigidTransform:
    """Forward-looking camera mount (camera -> body transform)."""
    return RigidTransform(CAMERA_TO_BODY.copy(), np.asarray(offset, dtype=float))


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point outside image")


DEFAULT_INTRINSICS = CameraIntrinsics(fx=600.0, fy=600.0, cx=320.0, cy=240.0, width=640, height=480)


def deproject(u: float, v: float, depth: float, intr: CameraIntrinsics) -> np.ndarray:
    """Pixel + depth -> 3D point in the camera frame."""
    if depth <= 0:
        raise InvalidDepthError(f"depth must be positive, got {depth}")
    if not (0 <= u <= intr.width and 0 <= v <= intr.height):
        raise OutOfBoundsError(f"pixel ({u}, {v}) outside {intr.width}x{intr.height} image")
    return vec3((u - intr.cx) * depth / intr.fx, (v - intr.cy) * depth / intr.fy, depth)


def project(p: np.ndarray, intr: CameraIntrinsics) -> tuple[float, float, float]:
    """Camera-frame point -> (u, v, depth)."""
    p = np.asarray(p, dtype=float)
    if p[2] <= 0:
        raise BehindCameraError(f"point behind camera: z={p[2]}")
    u = intr.fx * p[0] / p[2] + intr.cx
    v = intr.fy * p[1] / p[2] + intr.cy
    return u, v, p[2]


def body_to_world(drone_pose: Pose) -> RigidTransform:
    return RigidTransform.from_yaw(drone_pose.yaw, drone_pose.position)


def camera_to_world_transform(drone_pose: Pose, mount: RigidTransform) -> RigidTransform:
    return body_to_world(drone_pose).compose(mount)


def camera_to_world(p_cam: np.ndarray, drone_pose: Pose, mount: RigidTransform) -> np.ndarray:
    """Camera-frame point -> world frame via mount then drone pose."""
    return camera_to_world_transform(drone_pose, mount).apply(p_cam)


def world_to_camera(p_world: np.ndarray, drone_pose: Pose, mount: RigidTransform) -> np.ndarray:
    return camera_to_world_transform(drone_pose, mount).inverse().apply(p_world)
