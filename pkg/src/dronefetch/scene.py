"""Scene description: room, table, objects, human, drone home.

Scenes load from a JSON document whose fields mirror these dataclasses
one-to-one (lengths in meters, angles in radians). See
`docs/scene_schema.md` and `scenes/lab.json` for the schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .geometry import Pose, vec3, wrap_angle


class SceneError(ValueError):
    """Scene file fails schema or invariant checks."""


class HandSide(Enum):
    LEFT = "left"
    RIGHT = "right"
    CENTER = "center"


@dataclass(frozen=True)
class SceneObject:
    id: str
    noun: str
    attributes: frozenset[str]
    position: np.ndarray  # world frame, z = table height
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "attributes", frozenset(self.attributes))
        if not self.noun:
            raise SceneError(f"object {self.id!r}: empty noun")
        if self.radius <= 0:
            raise SceneError(f"object {self.id!r}: radius must be positive")

    @property
    def label(self) -> str:
        return " ".join(sorted(self.attributes) + [self.noun])


@dataclass(frozen=True)
class HumanModel:
    center: np.ndarray  # ground projection (z = 0)
    facing_yaw: float
    body_radius: float = 0.3
    shoulder_half_width: float = 0.22
    shoulder_height: float = 1.45
    preferred_hand: HandSide = HandSide.RIGHT

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))
        object.__setattr__(self, "facing_yaw", wrap_angle(self.facing_yaw))
        if self.body_radius <= 0 or self.shoulder_half_width <= 0 or self.shoulder_height <= 0:
            raise SceneError("human dimensions must be positive")


@dataclass(frozen=True)
class Table:
    center: np.ndarray  # (x, y)
    half_extents: np.ndarray  # (hx, hy)
    height: float


@dataclass
class Scene:
    bounds: tuple[float, float, float, float]  # x_min, x_max, y_min, y_max
    table: Table
    objects: list[SceneObject]
    human: HumanModel
    drone_home: Pose

    def vocabulary(self) -> tuple[set[str], set[str]]:
        nouns = {o.noun for o in self.objects}
        adjectives = set()
        for o in self.objects:
            adjectives |= o.attributes
        return nouns, adjectives

    def object_by_id(self, oid: str) -> SceneObject:
        for o in self.objects:
            if o.id == oid:
                return o
        raise KeyError(oid)


def _point_in_bounds(x, y, bounds):
    x_min, x_max, y_min, y_max = bounds
    return x_min <= x <= x_max and y_min <= y <= y_max


def validate(scene: Scene) -> list[str]:
    """Invariant check; returns a list of human-readable violations."""
    violations = []
    x_min, x_max, y_min, y_max = scene.bounds
    if x_max <= x_min or y_max <= y_min:
        violations.append("room bounds are degenerate")
        return violations
    if not _point_in_bounds(scene.human.center[0], scene.human.center[1], scene.bounds):
        violations.append("human lies outside room bounds")
    if not _point_in_bounds(scene.drone_home.position[0], scene.drone_home.position[1], scene.bounds):
        violations.append("drone home lies outside room bounds")
    tc, he = scene.table.center, scene.table.half_extents
    for o in scene.objects:
        if not _point_in_bounds(o.position[0], o.position[1], scene.bounds):
            violations.append(f"object {o.id!r} lies outside room bounds")
        if abs(o.position[2] - scene.table.height) > 1e-9:
            violations.append(f"object {o.id!r} does not rest on the table surface (z={o.position[2]}, table height={scene.table.height})")
        if not (abs(o.position[0] - tc[0]) <= he[0] and abs(o.position[1] - tc[1]) <= he[1]):
            violations.append(f"object {o.id!r} is off the table footprint")
    ids = [o.id for o in scene.objects]
    if len(ids) != len(set(ids)):
        violations.append("duplicate object ids")
    return violations


def from_dict(doc: dict) -> Scene:
    try:
        b = doc["bounds"]
        bounds = (float(b["x_min"]), float(b["x_max"]), float(b["y_min"]), float(b["y_max"]))
        t = doc["table"]
        table = Table(
            center=np.asarray(t["center"], dtype=float),
            half_extents=np.asarray(t["half_extents"], dtype=float),
            height=float(t["height"]),
        )
        objects = [
            SceneObject(
                id=str(o["id"]),
                noun=str(o["noun"]).lower(),
                attributes=frozenset(str(a).lower() for a in o.get("attributes", [])),
                position=np.asarray(o["position"], dtype=float),
                radius=float(o["radius"]),
            )
            for o in doc["objects"]
        ]
        h = doc["human"]
        human = HumanModel(
            center=vec3(float(h["center"][0]), float(h["center"][1]), 0.0),
            facing_yaw=float(h["facing_yaw"]),
            body_radius=float(h.get("body_radius", 0.3)),
            shoulder_half_width=float(h.get("shoulder_half_width", 0.22)),
            shoulder_height=float(h.get("shoulder_height", 1.45)),
            preferred_hand=HandSide(h.get("preferred_hand", "right")),
        )
        d = doc["drone_home"]
        drone_home = Pose(position=np.asarray(d["position"], dtype=float), yaw=float(d.get("yaw", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneError(f"malformed scene document: {exc}") from exc
    return Scene(bounds=bounds, table=table, objects=objects, human=human, drone_home=drone_home)


def to_dict(scene: Scene) -> dict:
    x_min, x_max, y_min, y_max = scene.bounds
    return {
        "bounds": {"x_min": x_min, "x_max": x_max, "y_min": y_min, "y_max": y_max},
        "table": {
            "center": list(map(float, scene.table.center)),
            "half_extents": list(map(float, scene.table.half_extents)),
            "height": scene.table.height,
        },
        "objects": [
            {
                "id": o.id,
                "noun": o.noun,
                "attributes": sorted(o.attributes),
                "position": list(map(float, o.position)),
                "radius": o.radius,
            }
            for o in scene.objects
        ],
        "human": {
            "center": [float(scene.human.center[0]), float(scene.human.center[1])],
            "facing_yaw": scene.human.facing_yaw,
            "body_radius": scene.human.body_radius,
            "shoulder_half_width": scene.human.shoulder_half_width,
            "shoulder_height": scene.human.shoulder_height,
            "preferred_hand": scene.human.preferred_hand.value,
        },
        "drone_home": {
            "position": list(map(float, scene.drone_home.position)),
            "yaw": scene.drone_home.yaw,
        },
    }


def load(path: str) -> Scene:
    """Load and validate a scene file; raises SceneError on any problem."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SceneError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    scene = from_dict(doc)
    violations = validate(scene)
    if violations:
        raise SceneError(f"{path}: " + "; ".join(violations))
    return scene


def default_scene() -> Scene:
    """Built-in 6 m x 6 m lab scene with a central table and one human."""
    table = Table(center=np.array([0.0, 0.0]), half_extents=np.array([0.8, 0.5]), height=0.75)
    th = table.height
    objects = [
        SceneObject("cup_red", "cup", frozenset({"red"}), vec3(0.35, 0.20, th), 0.04),
        SceneObject("cup_blue", "cup", frozenset({"blue"}), vec3(-0.30, 0.25, th), 0.04),
        SceneObject("plant_green", "plant", frozenset({"green"}), vec3(-0.45, -0.15, th), 0.08),
        SceneObject("screwdriver", "screwdriver", frozenset(), vec3(0.55, -0.30, th), 0.03),
        SceneObject("ball_yellow", "ball", frozenset({"yellow"}), vec3(0.05, -0.35, th), 0.05),
    ]
    human = HumanModel(center=vec3(0.0, 2.3, 0.0), facing_yaw=-math.pi / 2)
    home = Pose(position=vec3(-2.4, -2.4, 0.0), yaw=math.pi / 4)
    return Scene(bounds=(-3.0, 3.0, -3.0, 3.0), table=table, objects=objects, human=human, drone_home=home)


def randomize_objects(scene: Scene, rng: np.random.Generator, max_tries: int = 1000) -> Scene:
    """New scene with object positions re-sampled on the table surface.

    Uniform in the table rectangle inset by each object's radius,
    rejection-sampled so footprints do not overlap. Human and home are
    unchanged.
    """
    tc, he, th = scene.table.center, scene.table.half_extents, scene.table.height
    placed: list[SceneObject] = []
    for o in scene.objects:
        inset_x = he[0] - o.radius
        inset_y = he[1] - o.radius
        for _ in range(max_tries):
            x = tc[0] + rng.uniform(-inset_x, inset_x)
            y = tc[1] + rng.uniform(-inset_y, inset_y)
            if all(math.hypot(x - p.position[0], y - p.position[1]) > o.radius + p.radius for p in placed):
                placed.append(SceneObject(o.id, o.noun, o.attributes, vec3(x, y, th), o.radius))
                break
        else:
            raise SceneError(f"could not place object {o.id!r} without overlap")
    return Scene(bounds=scene.bounds, table=scene.table, objects=placed, human=scene.human, drone_home=scene.drone_home)
