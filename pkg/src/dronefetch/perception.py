"""Synthetic perception: labeled detections, depth samples, and skeleton
landmarks generated from ground truth, plus world-frame localization.

Stands in for the neural detector + RGB-D camera + pose landmarker; all
outputs are deterministic functions of (scene, pose, params, rng state).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    CameraIntrinsics,
    Pose,
    RigidTransform,
    camera_to_world,
    deproject,
    project,
    vec3,
    world_to_camera,
)
from .scene import HandSide, HumanModel, Scene


@dataclass(frozen=True)
class NoiseParams:
    sigma_px: float = 2.0
    sigma_depth: float = 0.02
    conf_lo: float = 0.5
    max_range: float = 6.0

    @staticmethod
    def zero() -> "NoiseParams":
        return NoiseParams(sigma_px=0.0, sigma_depth=0.0)


@dataclass(frozen=True)
class Detection:
    noun: str
    attributes: frozenset[str]
    bbox: tuple[float, float, float, float]  # u_min, v_min, u_max, v_max
    confidence: float
    centroid_depth: float
    object_id: str  # simulator privilege, used only for logging/tests

    @property
    def centroid(self) -> tuple[float, float]:
        u_min, v_min, u_max, v_max = self.bbox
        return (0.5 * (u_min + u_max), 0.5 * (v_min + v_max))

    @property
    def label(self) -> str:
        return " ".join(sorted(self.attributes) + [self.noun])


@dataclass(frozen=True)
class LocalizedDetection:
    detection: Detection
    world_point: np.ndarray


# The 33 pose-landmark names, in canonical order.
LANDMARK_NAMES = [
    "Nose", "LeftEyeInner", "LeftEye", "LeftEyeOuter", "RightEyeInner",
    "RightEye", "RightEyeOuter", "LeftEar", "RightEar", "MouthLeft",
    "MouthRight", "LeftShoulder", "RightShoulder", "LeftElbow",
    "RightElbow", "LeftWrist", "RightWrist", "LeftPinky", "RightPinky",
    "LeftIndex", "RightIndex", "LeftThumb", "RightThumb", "LeftHip",
    "RightHip", "LeftKnee", "RightKnee", "LeftAnkle", "RightAnkle",
    "LeftHeel", "RightHeel", "LeftFootIndex", "RightFootIndex",
]


@dataclass(frozen=True)
class SkeletonLandmarks:
    """33 named 3D keypoints in the world frame."""

    points: dict[str, np.ndarray]

    def __post_init__(self):
        missing = set(LANDMARK_NAMES) - set(self.points)
        extra = set(self.points) - set(LANDMARK_NAMES)
        if missing or extra:
            raise ValueError(f"skeleton must carry exactly the 33 landmarks (missing={sorted(missing)}, extra={sorted(extra)})")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.points[name]


def synth_detections(
    scene: Scene,
    drone_pose: Pose,
    intr: CameraIntrinsics,
    noise: NoiseParams,
    rng: np.random.Generator,
) -> list[Detection]:
    """One noisy Detection per scene object visible from the drone.

    Visible: center in front of the camera, projecting inside the image,
    within max_range. The rng is consumed in a fixed per-object order so
    results are deterministic for a given seed.
    """
    mount = scene_mount()
    out = []
    for obj in scene.objects:
        p_cam = world_to_camera(obj.position, drone_pose, mount)
        if p_cam[2] <= 0:
            continue
        if float(np.linalg.norm(p_cam)) > noise.max_range:
            continue
        u, v, depth = project(p_cam, intr)
        if not (0 <= u < intr.width and 0 <= v < intr.height):
            continue
        du, dv = rng.normal(0.0, 1.0, size=2)
        dd = rng.normal(0.0, 1.0)
        conf = rng.uniform(noise.conf_lo, 1.0)
        u_c = u + noise.sigma_px * du
        v_c = v + noise.sigma_px * dv
        depth_c = max(depth + noise.sigma_depth * dd, 1e-6)
        half = intr.fx * obj.radius / depth
        # Clamp symmetrically so the bbox stays centered on the centroid.
        half_u = min(half, u_c, intr.width - u_c)
        half_v = min(half, v_c, intr.height - v_c)
        if half_u <= 0 or half_v <= 0:
            continue
        bbox = (u_c - half_u, v_c - half_v, u_c + half_u, v_c + half_v)
        out.append(
            Detection(
                noun=obj.noun,
                attributes=obj.attributes,
                bbox=bbox,
                confidence=float(conf),
                centroid_depth=float(depth_c),
                object_id=obj.id,
            )
        )
    return out


def localize(
    det: Detection,
    drone_pose: Pose,
    intr: CameraIntrinsics,
    mount: RigidTransform,
) -> np.ndarray:
    """World point of a detection: bbox center + centroid depth,
    deprojected and transformed to the world frame."""
    u, v = det.centroid
    p_cam = deproject(u, v, det.centroid_depth, intr)
    return camera_to_world(p_cam, drone_pose, mount)


def scene_mount() -> RigidTransform:
    """Camera mount used by the synthetic camera (forward-looking,
    zero offset from the body origin)."""
    from .geometry import forward_mount

    return forward_mount()


def synth_skeleton(human: HumanModel) -> SkeletonLandmarks:
    """Deterministic skeleton on a canonical body scaled to the model.

    Left shoulder sits at +90 degrees from the facing direction; the
    preferred-hand wrist is extended forward, the other rests at its hip.
    """
    f = human.facing_yaw
    fwd = vec3(math.cos(f), math.sin(f), 0.0)
    left = vec3(math.cos(f + math.pi / 2), math.sin(f + math.pi / 2), 0.0)
    c = human.center
    hw = human.shoulder_half_width
    sh = human.shoulder_height
    hip_h = 0.55 * sh
    hip_hw = 0.7 * hw
    head_h = 1.12 * sh
    pts: dict[str, np.ndarray] = {}

    def put(name, lateral, height, forward=0.0):
        pts[name] = c + lateral * left + forward * fwd + vec3(0.0, 0.0, height)

    put("LeftShoulder", hw, sh)
    put("RightShoulder", -hw, sh)
    put("LeftHip", hip_hw, hip_h)
    put("RightHip", -hip_hw, hip_h)
    # Wrists: preferred hand extended forward at chest height, other at rest.
    extend = 0.35
    if human.preferred_hand == HandSide.LEFT:
        put("LeftWrist", hip_hw, 0.75 * sh, extend)
        put("RightWrist", -hip_hw, hip_h)
    else:
        put("LeftWrist", hip_hw, hip_h)
        put("RightWrist", -hip_hw, 0.75 * sh, extend)
    # Arms hang between shoulder and wrist.
    pts["LeftElbow"] = 0.5 * (pts["LeftShoulder"] + pts["LeftWrist"])
    pts["RightElbow"] = 0.5 * (pts["RightShoulder"] + pts["RightWrist"])
    for side, sgn in (("Left", 1.0), ("Right", -1.0)):
        w = pts[f"{side}Wrist"]
        put_hand = w + 0.08 * fwd
        pts[f"{side}Pinky"] = put_hand + 0.02 * sgn * left
        pts[f"{side}Index"] = put_hand - 0.02 * sgn * left
        pts[f"{side}Thumb"] = w + 0.05 * fwd
    # Head cluster.
    put("Nose", 0.0, head_h, 0.08)
    for side, sgn in (("Left", 1.0), ("Right", -1.0)):
        put(f"{side}EyeInner", 0.02 * sgn, head_h + 0.03, 0.07)
        put(f"{side}Eye", 0.035 * sgn, head_h + 0.03, 0.065)
        put(f"{side}EyeOuter", 0.05 * sgn, head_h + 0.03, 0.06)
        put(f"{side}Ear", 0.07 * sgn, head_h, 0.0)
        pts[f"Mouth{side}"] = c + 0.025 * sgn * left + 0.075 * fwd + vec3(0.0, 0.0, head_h - 0.04)
    # Legs straight down from the hips.
    for side, sgn in (("Left", 1.0), ("Right", -1.0)):
        put(f"{side}Knee", hip_hw * sgn, 0.28 * sh)
        put(f"{side}Ankle", hip_hw * sgn, 0.05 * sh)
        put(f"{side}Heel", hip_hw * sgn, 0.02 * sh, -0.04)
        put(f"{side}FootIndex", hip_hw * sgn, 0.0, 0.1)
    return SkeletonLandmarks(points=pts)
