"""Simulation configuration tree with dotted-key overrides.

Overrides come from the CLI (`--set section.field=value`) or from
environment variables prefixed DRONEFETCH_SET_ (double underscore for
the dot, e.g. DRONEFETCH_SET_control__kp_pos=0.5).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from enum import Enum

from .control import ControlParams
from .geometry import DEFAULT_INTRINSICS, CameraIntrinsics
from .handover import HandoverMode, HandoverParams
from .perception import NoiseParams

ENV_OVERRIDE_PREFIX = "DRONEFETCH_SET_"


class ConfigError(ValueError):
    """Bad override key or value."""


@dataclass(frozen=True)
class PlannerParams:
    resolution: float = 0.1  # m per cell
    human_body_radius_default: float = 0.3
    safety_margin: float = 0.7  # added to the human body radius
    drone_radius: float = 0.35  # inflates the table footprint
    granularity_compensation: bool = True  # widen the human ring by delta*sqrt(2)/2

    def human_inflation(self, body_radius: float) -> float:
        r = body_radius + self.safety_margin
        if self.granularity_compensation:
            # Any point of a free cell is within delta*sqrt(2)/2 of its
            # center; widen the ring so the net clearance keeps the full
            # body-radius + margin even between cell centers.
            r += self.resolution * (2.0**0.5) / 2.0
        return r


@dataclass(frozen=True)
class MissionParams:
    cruise_altitude: float = 1.2
    control_dt: float = 0.02
    perception_dt: float = 1.0 / 15.0
    default_timeout: float = 60.0  # s per state, overridable per state
    timeouts: dict = field(default_factory=dict)
    max_recoveries: int = 2
    handover_dwell: float = 2.0
    waypoint_tolerance: float = 0.15
    final_tolerance: float = 0.10
    settle_tolerance: float = 0.05
    yaw_tolerance: float = 0.20
    human_hard_floor: float = 0.8
    target_lost_ticks: int = 15  # consecutive missed perception ticks
    survey_dwell: float = 1.0
    mission_time_cap: float = 600.0

    def timeout_for(self, state_name: str) -> float:
        return float(self.timeouts.get(state_name, self.default_timeout))


@dataclass(frozen=True)
class SimConfig:
    noise: NoiseParams = field(default_factory=NoiseParams)
    control: ControlParams = field(default_factory=ControlParams)
    planner: PlannerParams = field(default_factory=PlannerParams)
    handover: HandoverParams = field(default_factory=HandoverParams)
    mission: MissionParams = field(default_factory=MissionParams)
    camera: CameraIntrinsics = DEFAULT_INTRINSICS


def _coerce(current, raw: str):
    if isinstance(current, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if isinstance(current, int) and not isinstance(current, bool):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if isinstance(current, Enum):
        return type(current)(raw)
    if isinstance(current, str):
        return raw
    raise ConfigError(f"cannot override value of type {type(current).__name__}")


def apply_overrides(cfg: SimConfig, overrides: dict[str, str]) -> SimConfig:
    """Return a new config with dotted-key string overrides applied."""
    for key, raw in overrides.items():
        parts = key.split(".")
        if len(parts) != 2:
            raise ConfigError(f"override key must be section.field, got {key!r}")
        section_name, field_name = parts
        if not hasattr(cfg, section_name):
            raise ConfigError(f"unknown config section {section_name!r}")
        section = getattr(cfg, section_name)
        if not hasattr(section, field_name):
            raise ConfigError(f"unknown field {field_name!r} in section {section_name!r}")
        try:
            value = _coerce(getattr(section, field_name), raw)
            new_section = dataclasses.replace(section, **{field_name: value})
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {exc}") from exc
        cfg = dataclasses.replace(cfg, **{section_name: new_section})
    return cfg


def env_overrides(environ=None) -> dict[str, str]:
    """Collect dotted-key overrides from the environment."""
    environ = os.environ if environ is None else environ
    out = {}
    for name, value in sorted(environ.items()):
        if name.startswith(ENV_OVERRIDE_PREFIX):
            key = name[len(ENV_OVERRIDE_PREFIX):].replace("__", ".").lower()
            out[key] = value
    return out


def with_handover_mode(cfg: SimConfig, mode: str) -> SimConfig:
    params = dataclasses.replace(cfg.handover, mode=HandoverMode(mode))
    return dataclasses.replace(cfg, handover=params)
