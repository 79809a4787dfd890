"""Human orientation estimation and handover pose computation.

The torso vector is right shoulder minus left shoulder; its arctangent
gives the torso yaw, and the facing direction is torso yaw + pi/2 (left
shoulder at +90 degrees from facing). Two placement modes exist for the
handover offset direction, selectable via HandoverParams.mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import Pose, vec3, wrap_angle
from .scene import HandSide
from .perception import SkeletonLandmarks


class DegenerateSkeletonError(ValueError):
    """Shoulder landmarks coincide; torso direction undefined."""


class HandoverMode(Enum):
    FACING = "facing"  # offset along the person's facing direction
    EQ4_VERBATIM = "eq4"  # offset at torso yaw + pi


@dataclass(frozen=True)
class HumanOrientation:
    torso_vector: np.ndarray
    yaw: float
    facing_yaw: float


@dataclass(frozen=True)
class HandoverParams:
    distance: float = 0.7  # horizontal standoff, 0.6..0.8
    chest_height: float = 1.15  # above ground, 1.0..1.3
    mode: HandoverMode = HandoverMode.FACING

    def __post_init__(self):
        if not (0.6 <= self.distance <= 0.8):
            raise ValueError("handover distance must lie in [0.6, 0.8] m")
        if not (1.0 <= self.chest_height <= 1.3):
            raise ValueError("handover height must lie in [1.0, 1.3] m")


@dataclass(frozen=True)
class HandoverPose:
    pose: Pose  # drone target; yaw points at the human
    side: HandSide


def estimate_orientation(sk: SkeletonLandmarks) -> HumanOrientation:
    """Torso vector and yaw from the shoulder landmarks."""
    torso = sk["RightShoulder"] - sk["LeftShoulder"]
    if math.hypot(torso[0], torso[1]) < 1e-12:
        raise DegenerateSkeletonError("shoulder landmarks coincide")
    yaw = math.atan2(torso[1], torso[0])
    return HumanOrientation(torso_vector=torso, yaw=yaw, facing_yaw=wrap_angle(yaw + math.pi / 2))


def estimate_hand_side(sk: SkeletonLandmarks, orientation: HumanOrientation, epsilon: float = 0.05) -> HandSide:
    """Side whose wrist is farther from its hip; Center when both are
    within epsilon of each other."""
    left_ext = float(np.linalg.norm(sk["LeftWrist"] - sk["LeftHip"]))
    right_ext = float(np.linalg.norm(sk["RightWrist"] - sk["RightHip"]))
    if abs(left_ext - right_ext) <= epsilon:
        return HandSide.CENTER
    return HandSide.LEFT if left_ext > right_ext else HandSide.RIGHT


def handover_pose(
    human_center: np.ndarray,
    orientation: HumanOrientation,
    params: HandoverParams,
    side: HandSide = HandSide.CENTER,
) -> HandoverPose:
    """Target drone pose for the handover.

    FACING mode places the point `distance` along the facing direction
    ("in front of the human"); EQ4_VERBATIM offsets at torso yaw + pi.
    Height is chest height above the human's ground z; drone yaw points
    from the handover point toward the human.
    """
    human_center = np.asarray(human_center, dtype=float)
    if params.mode == HandoverMode.FACING:
        angle = orientation.facing_yaw
    else:
        angle = orientation.yaw + math.pi
    offset = vec3(params.distance * math.cos(angle), params.distance * math.sin(angle), 0.0)
    position = human_center + offset + vec3(0.0, 0.0, params.chest_height)
    yaw = math.atan2(human_center[1] - position[1], human_center[0] - position[0])
    return HandoverPose(pose=Pose(position=position, yaw=yaw), side=side)
