"""Simulated drone kinematics and servo laws.

First-order velocity-driven plant (no attitude dynamics), proportional
PBVS for coarse navigation, a simplified IBVS mapping for fine
alignment, a threshold-based binary gripper policy, and the PBVS/IBVS
mode selector with hysteresis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .geometry import CameraIntrinsics, InvalidDepthError, wrap_angle


class Gripper(Enum):
    OPEN = "open"
    CLOSED = "closed"


class GraspPhase(Enum):
    APPROACH = "approach"
    GRASPING = "grasping"
    CARRYING = "carrying"
    HANDOVER = "handover"


class ServoMode(Enum):
    PBVS = "pbvs"
    IBVS = "ibvs"


@dataclass(frozen=True)
class ControlParams:
    v_max: float = 1.0  # m/s
    omega_max: float = 1.5  # rad/s
    tau: float = 0.2  # s, first-order velocity time constant
    kp_pos: float = 0.8
    kp_yaw: float = 1.5
    ibvs_gain: float = 1.0
    kp_standoff: float = 0.8
    grasp_radius: float = 0.10  # m
    align_tol: float = 0.05  # m lateral
    switch_radius: float = 0.5  # m, PBVS -> IBVS
    switch_hysteresis: float = 0.1  # m


@dataclass(frozen=True)
class VelocityCommand:
    vx: float = 0.0
    vy: float = 0.0
    vz: float = 0.0
    yaw_rate: float = 0.0

    def velocity(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz])


@dataclass(frozen=True)
class DroneState:
    position: np.ndarray
    yaw: float
    velocity: np.ndarray
    yaw_rate: float
    gripper: Gripper = Gripper.OPEN
    payload: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        if self.payload is not None and self.gripper != Gripper.CLOSED:
            raise ValueError("payload requires a closed gripper")

    @staticmethod
    def at_rest(position, yaw: float = 0.0) -> "DroneState":
        return DroneState(position=np.asarray(position, dtype=float), yaw=yaw, velocity=np.zeros(3), yaw_rate=0.0)


def saturate(cmd: VelocityCommand, params: ControlParams) -> VelocityCommand:
    """Clamp velocity magnitude to v_max and |yaw_rate| to omega_max."""
    v = cmd.velocity()
    speed = float(np.linalg.norm(v))
    if speed > params.v_max:
        v = v * (params.v_max / speed)
    wr = min(max(cmd.yaw_rate, -params.omega_max), params.omega_max)
    return VelocityCommand(vx=float(v[0]), vy=float(v[1]), vz=float(v[2]), yaw_rate=wr)


def step_dynamics(state: DroneState, cmd: VelocityCommand, dt: float, params: ControlParams) -> DroneState:
    """First-order velocity slew toward the saturated command, then
    Euler position/yaw integration. Deterministic."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    cmd = saturate(cmd, params)
    alpha = math.exp(-dt / params.tau)
    v_new = cmd.velocity() + (state.velocity - cmd.velocity()) * alpha
    wr_new = cmd.yaw_rate + (state.yaw_rate - cmd.yaw_rate) * alpha
    return replace(
        state,
        position=state.position + v_new * dt,
        yaw=wrap_angle(state.yaw + wr_new * dt),
        velocity=v_new,
        yaw_rate=wr_new,
    )


def pbvs_command(
    state: DroneState,
    waypoint: np.ndarray,
    target_yaw: float,
    params: ControlParams,
) -> VelocityCommand:
    """Proportional position-based law toward a 3D waypoint."""
    err = np.asarray(waypoint, dtype=float) - state.position
    v = params.kp_pos * err
    wr = params.kp_yaw * wrap_angle(target_yaw - state.yaw)
    return saturate(VelocityCommand(vx=float(v[0]), vy=float(v[1]), vz=float(v[2]), yaw_rate=float(wr)), params)


@dataclass(frozen=True)
class ImageFeatureError:
    u: float
    v: float
    u_des: float
    v_des: float
    depth: float  # Z estimate of the feature

    def __post_init__(self):
        if self.depth <= 0:
            raise InvalidDepthError(f"feature depth must be positive, got {self.depth}")


def ibvs_command(
    err: ImageFeatureError,
    intr: CameraIntrinsics,
    standoff_error: float,
    yaw: float,
    params: ControlParams,
) -> VelocityCommand:
    """Simplified image-based law for a forward-looking camera.

    Body-frame: lateral = -gain*(u-u*)*Z/fx, vertical = -gain*(v-v*)*Z/fy,
    forward = kp*standoff_error; rotated by `yaw` into the world frame.
    """
    lat = -params.ibvs_gain * (err.u - err.u_des) * err.depth / intr.fx  # body +y (left)
    vert = -params.ibvs_gain * (err.v - err.v_des) * err.depth / intr.fy  # body +z (up)
    fwd = params.kp_standoff * standoff_error  # body +x
    c, s = math.cos(yaw), math.sin(yaw)
    return saturate(
        VelocityCommand(vx=c * fwd - s * lat, vy=s * fwd + c * lat, vz=vert, yaw_rate=0.0),
        params,
    )


def gripper_policy(target_rel: np.ndarray, phase: GraspPhase, params: ControlParams) -> Gripper:
    """Binary gripper command from proximity to the target.

    target_rel is the target position in the body frame (x forward).
    Close only while grasping within the grasp radius and laterally
    aligned, or while carrying; otherwise open.
    """
    if phase == GraspPhase.CARRYING:
        return Gripper.CLOSED
    if phase == GraspPhase.GRASPING:
        rel = np.asarray(target_rel, dtype=float)
        dist = float(np.linalg.norm(rel))
        lateral = math.hypot(rel[1], rel[2])
        if dist <= params.grasp_radius and lateral <= params.align_tol:
            return Gripper.CLOSED
    return Gripper.OPEN


@dataclass
class ServoModeSelector:
    """PBVS/IBVS switching with a hysteresis band against chattering."""

    params: ControlParams = field(default_factory=ControlParams)
    mode: ServoMode = ServoMode.PBVS

    def update(self, distance_to_target: float, target_visible: bool) -> ServoMode:
        if distance_to_target < 0:
            raise ValueError("distance must be non-negative")
        if self.mode == ServoMode.PBVS:
            if target_visible and distance_to_target < self.params.switch_radius:
                self.mode = ServoMode.IBVS
        else:
            if not target_visible or distance_to_target > self.params.switch_radius + self.params.switch_hysteresis:
                self.mode = ServoMode.PBVS
        return self.mode
