"""Mission state machine: survey, localize, plan, navigate, grasp,
deliver, return, with safety checks, failure recovery, and logging.

One mission is a single-threaded deterministic tick loop; everything in
the log is a pure function of (scene, task queue, config, seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .config import SimConfig
from .control import (
    ControlParams,
    DroneState,
    GraspPhase,
    Gripper,
    ImageFeatureError,
    ServoMode,
    ServoModeSelector,
    VelocityCommand,
    gripper_policy,
    ibvs_command,
    pbvs_command,
    step_dynamics,
)
from .geometry import Pose, vec3, wrap_angle
from .grammar import ObjectNotFoundError, TaskQueue, ground_task
from .handover import estimate_hand_side, estimate_orientation, handover_pose
from .perception import LocalizedDetection, localize, scene_mount, synth_detections, synth_skeleton
from .planner import (
    CircularObstacle,
    PlanningError,
    RectObstacle,
    plan_leg,
    rasterize,
)
from .scene import Scene


class MissionState(Enum):
    IDLE = "idle"
    TAKEOFF = "takeoff"
    SURVEY = "survey"
    LOCALIZE = "localize"
    PLAN_TO_OBJECT = "plan_to_object"
    NAVIGATE_TO_OBJECT = "navigate_to_object"
    GRASP = "grasp"
    PLAN_TO_HUMAN = "plan_to_human"
    NAVIGATE_TO_HUMAN = "navigate_to_human"
    HANDOVER = "handover"
    PLAN_TO_HOME = "plan_to_home"
    RETURN_HOME = "return_home"
    LAND = "land"
    RECOVERING = "recovering"
    ABORTED = "aborted"
    COMPLETED = "completed"


# Documented state graph; every logged transition must be one of these edges.
STATE_GRAPH: set[tuple[MissionState, MissionState]] = {
    (MissionState.IDLE, MissionState.TAKEOFF),
    (MissionState.TAKEOFF, MissionState.SURVEY),
    (MissionState.SURVEY, MissionState.LOCALIZE),
    (MissionState.LOCALIZE, MissionState.PLAN_TO_OBJECT),
    (MissionState.PLAN_TO_OBJECT, MissionState.NAVIGATE_TO_OBJECT),
    (MissionState.NAVIGATE_TO_OBJECT, MissionState.GRASP),
    (MissionState.GRASP, MissionState.PLAN_TO_HUMAN),
    (MissionState.PLAN_TO_HUMAN, MissionState.NAVIGATE_TO_HUMAN),
    (MissionState.NAVIGATE_TO_HUMAN, MissionState.HANDOVER),
    (MissionState.HANDOVER, MissionState.PLAN_TO_HOME),
    (MissionState.PLAN_TO_HOME, MissionState.RETURN_HOME),
    (MissionState.RETURN_HOME, MissionState.LOCALIZE),
    (MissionState.RETURN_HOME, MissionState.LAND),
    (MissionState.LAND, MissionState.COMPLETED),
    (MissionState.LOCALIZE, MissionState.RECOVERING),
    (MissionState.PLAN_TO_OBJECT, MissionState.RECOVERING),
    (MissionState.NAVIGATE_TO_OBJECT, MissionState.RECOVERING),
    (MissionState.GRASP, MissionState.RECOVERING),
    (MissionState.PLAN_TO_HUMAN, MissionState.RECOVERING),
    (MissionState.NAVIGATE_TO_HUMAN, MissionState.RECOVERING),
    (MissionState.HANDOVER, MissionState.RECOVERING),
    (MissionState.PLAN_TO_HOME, MissionState.RECOVERING),
    (MissionState.RETURN_HOME, MissionState.RECOVERING),
    (MissionState.TAKEOFF, MissionState.RECOVERING),
    (MissionState.SURVEY, MissionState.RECOVERING),
    (MissionState.LAND, MissionState.RECOVERING),
    (MissionState.RECOVERING, MissionState.SURVEY),
    (MissionState.RECOVERING, MissionState.LOCALIZE),
    (MissionState.RECOVERING, MissionState.PLAN_TO_OBJECT),
    (MissionState.RECOVERING, MissionState.PLAN_TO_HUMAN),
    (MissionState.RECOVERING, MissionState.PLAN_TO_HOME),
    (MissionState.RECOVERING, MissionState.ABORTED),
}

NAVIGATION_STATES = {
    MissionState.NAVIGATE_TO_OBJECT.value,
    MissionState.NAVIGATE_TO_HUMAN.value,
    MissionState.RETURN_HOME.value,
}

# Recovery re-entry point for each interruptible state.
_RETURN_STATE = {
    MissionState.TAKEOFF: MissionState.SURVEY,
    MissionState.SURVEY: MissionState.SURVEY,
    MissionState.LOCALIZE: MissionState.SURVEY,
    MissionState.PLAN_TO_OBJECT: MissionState.PLAN_TO_OBJECT,
    MissionState.NAVIGATE_TO_OBJECT: MissionState.PLAN_TO_OBJECT,
    MissionState.GRASP: MissionState.PLAN_TO_OBJECT,
    MissionState.PLAN_TO_HUMAN: MissionState.PLAN_TO_HUMAN,
    MissionState.NAVIGATE_TO_HUMAN: MissionState.PLAN_TO_HUMAN,
    MissionState.HANDOVER: MissionState.PLAN_TO_HUMAN,
    MissionState.PLAN_TO_HOME: MissionState.PLAN_TO_HOME,
    MissionState.RETURN_HOME: MissionState.PLAN_TO_HOME,
    MissionState.LAND: MissionState.PLAN_TO_HOME,
}


@dataclass
class TickRecord:
    t: float
    x: float
    y: float
    z: float
    yaw: float
    state: str
    gripper: str


@dataclass
class Event:
    t: float
    kind: str
    data: dict


@dataclass
class LegLog:
    name: str
    reference: list  # [[x, y, z], ...] smoothed reference at cruise altitude
    achieved: list  # [[x, y, z], ...] per-tick positions while navigating


@dataclass
class MissionLog:
    records: list[TickRecord] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    legs: list[LegLog] = field(default_factory=list)
    outcome: str | None = None  # "success" | "failure"
    failure_mode: str | None = None
    human_center: tuple[float, float] = (0.0, 0.0)
    n_tasks: int = 0

    NAVIGATION_STATES = NAVIGATION_STATES

    def outcome_str(self) -> str:
        if self.outcome == "success":
            return "success"
        return f"failure:{self.failure_mode or 'unknown'}"

    def gripper_events(self) -> list[tuple[str, str]]:
        return [(e.data["action"], e.data["context"]) for e in self.events if e.kind == "gripper"]

    def gripper_sequence_ok(self) -> bool:
        """Per task, exactly [close@object, open@human]."""
        expected = [("close", "object"), ("open", "human")] * self.n_tasks
        return self.gripper_events() == expected

    def transitions(self) -> list[tuple[str, str]]:
        return [(e.data["from"], e.data["to"]) for e in self.events if e.kind == "state_transition"]


class MissionRunner:
    """Deterministic tick-driven executor for one mission."""

    def __init__(self, scene: Scene, queue: TaskQueue, cfg: SimConfig, seed: int = 0,
                 perception_dropouts: list[tuple[float, float]] | None = None):
        self.scene = scene
        self.queue = list(queue)
        self.cfg = cfg
        self.rng = np.random.default_rng(seed)
        self.mount = scene_mount()
        self.perception_dropouts = perception_dropouts or []

        self.log = MissionLog(
            human_center=(float(scene.human.center[0]), float(scene.human.center[1])),
            n_tasks=len(self.queue),
        )
        self.drone = DroneState.at_rest(scene.drone_home.position, scene.drone_home.yaw)
        self.t = 0.0
        self.state = MissionState.IDLE
        self.state_entered = 0.0
        self.recoveries: dict[str, int] = {}
        self.task_idx = 0

        self.grid = None
        self.survey_poses = self._default_survey_poses()
        self.survey_idx = 0
        self.survey_dwell_start = None
        self.survey_detections: list[LocalizedDetection] = []
        self.last_detections: list[LocalizedDetection] = []
        self.next_perception_t = 0.0
        self.missed_target_ticks = 0

        self.target_point = None  # refined object estimate (3,)
        self.target_object_id = None
        self.handover = None
        self.handover_side = None

        self.path = None
        self.wp_idx = 0
        self.nav_target_yaw = self.drone.yaw
        self.current_leg: LegLog | None = None
        self.grasp_staging = None
        self.handover_staging = None
        self.phase = None  # sub-phase within GRASP / HANDOVER / RECOVERING
        self.phase_data: dict = {}
        self.servo_selector = ServoModeSelector(params=cfg.control)

    # ------------------------------------------------------------------
    # helpers

    def _default_survey_poses(self) -> list[Pose]:
        """Home vantage plus two lateral vantages, all facing the table."""
        home = self.scene.drone_home.position
        alt = self.cfg.mission.cruise_altitude
        table = self.scene.table.center
        base = vec3(home[0], home[1], alt)
        heading = math.atan2(table[1] - home[1], table[0] - home[0])
        lateral = vec3(-math.sin(heading), math.cos(heading), 0.0)
        poses = []
        for offset in (0.0, 0.9, -0.9):
            p = base + offset * lateral
            yaw = math.atan2(table[1] - p[1], table[0] - p[0])
            poses.append(Pose(position=p, yaw=yaw))
        return poses

    def _event(self, kind: str, **data):
        self.log.events.append(Event(t=round(self.t, 6), kind=kind, data=data))

    def _transition(self, new_state: MissionState):
        edge = (self.state, new_state)
        if edge not in STATE_GRAPH:
            raise AssertionError(f"illegal state transition {edge}")
        self._event("state_transition", **{"from": self.state.value, "to": new_state.value})
        self.state = new_state
        self.state_entered = self.t
        self.phase = None
        self.phase_data = {}

    def _fail(self, mode: str):
        if self.log.outcome is None:
            self.log.outcome = "failure"
            self.log.failure_mode = mode
            self._event("failure", mode=mode)

    def _horizontal_dist_to_human(self) -> float:
        h = self.scene.human.center
        return math.hypot(self.drone.position[0] - h[0], self.drone.position[1] - h[1])

    def _build_grid(self):
        if self.grid is not None:
            return
        p = self.cfg.planner
        human = self.scene.human
        circles = [CircularObstacle(float(human.center[0]), float(human.center[1]), p.human_inflation(human.body_radius))]
        t = self.scene.table
        rects = [RectObstacle(float(t.center[0]), float(t.center[1]), float(t.half_extents[0]) + p.drone_radius, float(t.half_extents[1]) + p.drone_radius)]
        self.grid = rasterize(self.scene.bounds, p.resolution, circles, rects)

    def _perceive(self):
        """Refresh detections at the perception rate; count target misses."""
        if self.t + 1e-9 < self.next_perception_t:
            return
        self.next_perception_t += self.cfg.mission.perception_dt
        pose = Pose(position=self.drone.position, yaw=self.drone.yaw)
        dets = synth_detections(self.scene, pose, self.cfg.camera, self.cfg.noise, self.rng)
        suppressed = any(t0 <= self.t <= t1 for t0, t1 in self.perception_dropouts)
        if suppressed:
            dets = []
        self.last_detections = [
            LocalizedDetection(d, localize(d, pose, self.cfg.camera, self.mount)) for d in dets
        ]
        if self.state == MissionState.SURVEY and self.survey_dwell_start is not None:
            self.survey_detections.extend(self.last_detections)
        if self.target_object_id is not None and self.state == MissionState.GRASP:
            if any(ld.detection.object_id == self.target_object_id for ld in self.last_detections):
                self.missed_target_ticks = 0
            else:
                self.missed_target_ticks += 1

    def _goto(self, target, target_yaw: float) -> VelocityCommand:
        return pbvs_command(self.drone, np.asarray(target, dtype=float), target_yaw, self.cfg.control)

    def _at(self, target, tol: float) -> bool:
        return float(np.linalg.norm(self.drone.position - np.asarray(target, dtype=float))) < tol

    def _start_leg(self, name: str, goal_xy) -> bool:
        """Plan a leg from the current position; False when planning fails."""
        self._build_grid()
        try:
            path = plan_leg(self.grid, (self.drone.position[0], self.drone.position[1]), (goal_xy[0], goal_xy[1]))
        except PlanningError as exc:
            self._event("planning_failed", detail=str(exc))
            return False
        self.path = path
        self.wp_idx = 0
        alt = self.cfg.mission.cruise_altitude
        self.current_leg = LegLog(
            name=name,
            reference=[[float(x), float(y), alt] for x, y in path.waypoints],
            achieved=[],
        )
        self.log.legs.append(self.current_leg)
        self.nav_target_yaw = self.drone.yaw
        return True

    def _follow_path(self) -> tuple[VelocityCommand, bool]:
        """PBVS along the current path at cruise altitude; done on final
        waypoint arrival."""
        m = self.cfg.mission
        wps = self.path.waypoints
        x, y = self.drone.position[0], self.drone.position[1]
        while self.wp_idx < len(wps) - 1 and math.hypot(wps[self.wp_idx][0] - x, wps[self.wp_idx][1] - y) < m.waypoint_tolerance:
            self.wp_idx += 1
        tx, ty = wps[self.wp_idx]
        dist = math.hypot(tx - x, ty - y)
        if dist > 0.3:
            self.nav_target_yaw = math.atan2(ty - y, tx - x)
        done = self.wp_idx == len(wps) - 1 and dist < m.final_tolerance
        cmd = self._goto(vec3(tx, ty, m.cruise_altitude), self.nav_target_yaw)
        return cmd, done

    def _recover(self, trigger: str, behavior: str):
        """Enter RECOVERING (or ABORTED when the budget is exhausted)."""
        key = self.state.value
        self.recoveries[key] = self.recoveries.get(key, 0) + 1
        self._event("recovery", trigger=trigger, state=key, attempt=self.recoveries[key])
        return_state = _RETURN_STATE.get(self.state, MissionState.PLAN_TO_HOME)
        self._transition(MissionState.RECOVERING)
        if self.recoveries[key] > self.cfg.mission.max_recoveries:
            self._fail(trigger)
            self._transition(MissionState.ABORTED)
            self.phase = "return"
            return
        self.phase = behavior
        self.phase_data = {"return_state": return_state}
        self.missed_target_ticks = 0

    # ------------------------------------------------------------------
    # state handlers (each returns the commanded velocity)

    def _tick_idle(self):
        self._transition(MissionState.TAKEOFF)
        return VelocityCommand()

    def _tick_takeoff(self):
        m = self.cfg.mission
        home = self.scene.drone_home
        target = vec3(home.position[0], home.position[1], m.cruise_altitude)
        if self._at(target, m.final_tolerance):
            self._transition(MissionState.SURVEY)
            self.survey_idx = 0
            self.survey_dwell_start = None
        return self._goto(target, home.yaw)

    def _tick_survey(self):
        m = self.cfg.mission
        pose = self.survey_poses[self.survey_idx]
        at_pose = self._at(pose.position, m.final_tolerance) and abs(wrap_angle(pose.yaw - self.drone.yaw)) < m.yaw_tolerance
        if at_pose and self.survey_dwell_start is None:
            self.survey_dwell_start = self.t
        if self.survey_dwell_start is not None and self.t - self.survey_dwell_start >= m.survey_dwell:
            self._event("detections", survey_pose=self.survey_idx, count=len(self.survey_detections))
            self.survey_dwell_start = None
            self.survey_idx += 1
            if self.survey_idx >= len(self.survey_poses):
                self._transition(MissionState.LOCALIZE)
        return self._goto(pose.position, pose.yaw)

    def _tick_localize(self):
        task = self.queue[self.task_idx]
        self._event("task_start", priority=task.priority,
                    descriptor={"noun": task.descriptor.noun, "attributes": list(task.descriptor.attributes)})
        try:
            grounded = ground_task(task, self.survey_detections, self.drone.position)
        except ObjectNotFoundError:
            self._recover("object-not-found", "resurvey")
            return VelocityCommand()
        # Refine the estimate: average nearby same-label detections.
        pts = [
            ld.world_point
            for ld in self.survey_detections
            if ld.detection.noun == grounded.detection.noun
            and ld.detection.attributes == grounded.detection.attributes
            and float(np.linalg.norm(ld.world_point - grounded.world_point)) < 0.3
        ]
        self.target_point = np.mean(np.asarray(pts), axis=0)
        self.target_object_id = grounded.detection.object_id
        self._event(
            "grounding",
            object_id=grounded.detection.object_id,
            label=grounded.detection.label,
            position=[float(v) for v in self.target_point],
        )
        # Human localization from the synthetic skeleton.
        sk = synth_skeleton(self.scene.human)
        orientation = estimate_orientation(sk)
        hips_mid = 0.5 * (sk["LeftHip"] + sk["RightHip"])
        center = vec3(hips_mid[0], hips_mid[1], 0.0)
        side = estimate_hand_side(sk, orientation)
        self.handover = handover_pose(center, orientation, self.cfg.handover, side)
        self.handover_side = side
        self._event(
            "handover_target",
            position=[float(v) for v in self.handover.pose.position],
            yaw=float(self.handover.pose.yaw),
            side=side.value,
        )
        self._transition(MissionState.PLAN_TO_OBJECT)
        return VelocityCommand()

    def _tick_plan_to_object(self):
        name = f"task{self.task_idx}_to_object"
        if self._start_leg(name, self.target_point):
            self.grasp_staging = self.path.waypoints[-1].copy()
            self._transition(MissionState.NAVIGATE_TO_OBJECT)
        else:
            self._recover("no-path", "resurvey")
        return VelocityCommand()

    def _tick_navigate(self, next_state: MissionState):
        cmd, done = self._follow_path()
        self.current_leg.achieved.append(
            [float(self.drone.position[0]), float(self.drone.position[1]), float(self.drone.position[2])]
        )
        if done:
            self._transition(next_state)
        return cmd

    def _tick_navigate_to_object(self):
        return self._tick_navigate(MissionState.GRASP)

    def _tick_grasp(self):
        m = self.cfg.mission
        c = self.cfg.control
        obj = self.scene.object_by_id(self.target_object_id)
        grasp_alt = self.scene.table.height + obj.radius
        est = self.target_point
        if self.phase is None:
            self.phase = "descend"
        if self.phase == "descend":
            yaw = math.atan2(est[1] - self.drone.position[1], est[0] - self.drone.position[0])
            target = vec3(self.drone.position[0], self.drone.position[1], grasp_alt)
            if abs(self.drone.position[2] - grasp_alt) < m.settle_tolerance:
                self.phase = "approach"
            return self._goto(target, yaw)
        if self.phase == "approach":
            if self.missed_target_ticks >= m.target_lost_ticks:
                self._recover("target-lost", "resurvey")
                return VelocityCommand()
            # true relative position decides attachment (simulator privilege)
            rel_world = obj.position - self.drone.position
            dist = float(np.linalg.norm(rel_world))
            yaw = math.atan2(est[1] - self.drone.position[1], est[0] - self.drone.position[0])
            body_rel = _world_to_body(rel_world, self.drone.yaw)
            if gripper_policy(body_rel, GraspPhase.GRASPING, c) == Gripper.CLOSED:
                self.drone = _with_gripper(self.drone, Gripper.CLOSED, obj.id)
                self._event("gripper", action="close", context="object", object_id=obj.id)
                self.phase = "ascend"
                return VelocityCommand()
            mode = self.servo_selector.update(dist, self._target_feature() is not None)
            if mode == ServoMode.IBVS:
                feat = self._target_feature()
                if feat is not None:
                    err, depth = feat
                    standoff = float(np.linalg.norm((est - self.drone.position)[:2]))
                    return ibvs_command(err, self.cfg.camera, standoff, self.drone.yaw, c)
            return self._goto(vec3(est[0], est[1], grasp_alt), yaw)
        if self.phase == "ascend":
            target = vec3(self.drone.position[0], self.drone.position[1], m.cruise_altitude)
            if abs(self.drone.position[2] - m.cruise_altitude) < m.settle_tolerance:
                self.phase = "retreat"
            return self._goto(target, self.drone.yaw)
        # retreat to the pre-grasp staging point so the next leg starts
        # from free space
        target = vec3(self.grasp_staging[0], self.grasp_staging[1], m.cruise_altitude)
        yaw = math.atan2(target[1] - self.drone.position[1], target[0] - self.drone.position[0]) if not self._at(target, 0.3) else self.drone.yaw
        if self._at(target, m.settle_tolerance):
            self._transition(MissionState.PLAN_TO_HUMAN)
        return self._goto(target, yaw)

    def _target_feature(self):
        """Latest image feature of the grounded object, or None."""
        for ld in self.last_detections:
            if ld.detection.object_id == self.target_object_id:
                u, v = ld.detection.centroid
                intr = self.cfg.camera
                try:
                    err = ImageFeatureError(u=u, v=v, u_des=intr.cx, v_des=intr.cy, depth=ld.detection.centroid_depth)
                except ValueError:
                    return None
                return err, ld.detection.centroid_depth
        return None

    def _tick_plan_to_human(self):
        name = f"task{self.task_idx}_to_human"
        hp = self.handover.pose.position
        if self._start_leg(name, hp):
            self.handover_staging = self.path.waypoints[-1].copy()
            self._transition(MissionState.NAVIGATE_TO_HUMAN)
        else:
            self._recover("no-path", "resurvey")
        return VelocityCommand()

    def _tick_navigate_to_human(self):
        return self._tick_navigate(MissionState.HANDOVER)

    def _tick_handover(self):
        m = self.cfg.mission
        hp = self.handover.pose
        if self.phase is None:
            self.phase = "approach"
        if self.phase == "approach":
            if self._at(hp.position, m.final_tolerance) and abs(wrap_angle(hp.yaw - self.drone.yaw)) < m.yaw_tolerance:
                self.phase = "dwell"
                self.phase_data["dwell_start"] = self.t
            return self._goto(hp.position, hp.yaw)
        if self.phase == "dwell":
            if self.t - self.phase_data["dwell_start"] >= m.handover_dwell:
                released = self.drone.payload
                self.drone = _with_gripper(self.drone, Gripper.OPEN, None)
                self._event("gripper", action="open", context="human", object_id=released)
                self.phase = "retreat"
            return self._goto(hp.position, hp.yaw)
        target = vec3(self.handover_staging[0], self.handover_staging[1], m.cruise_altitude)
        if self._at(target, m.settle_tolerance):
            self._transition(MissionState.PLAN_TO_HOME)
        return self._goto(target, self.drone.yaw)

    def _tick_plan_to_home(self):
        name = f"task{self.task_idx}_to_home"
        home = self.scene.drone_home.position
        if self._start_leg(name, home):
            self._transition(MissionState.RETURN_HOME)
        else:
            # cannot even plan home: land in place
            self._fail("no-path:plan_to_home")
            self._recover("no-path", "resurvey")
        return VelocityCommand()

    def _tick_return_home(self):
        cmd, done = self._follow_path()
        self.current_leg.achieved.append(
            [float(self.drone.position[0]), float(self.drone.position[1]), float(self.drone.position[2])]
        )
        if done:
            if self.log.outcome is None and self.task_idx + 1 < len(self.queue):
                self.task_idx += 1
                self._transition(MissionState.LOCALIZE)
            else:
                self._transition(MissionState.LAND)
        return cmd

    def _tick_land(self):
        m = self.cfg.mission
        target = vec3(self.drone.position[0], self.drone.position[1], self.scene.drone_home.position[2])
        if abs(self.drone.position[2] - target[2]) < m.settle_tolerance:
            if self.log.outcome is None:
                self.log.outcome = "success"
            self._transition(MissionState.COMPLETED)
        return self._goto(target, self.drone.yaw)

    def _tick_recovering(self):
        m = self.cfg.mission
        if self.phase == "resurvey":
            self.survey_idx = 0
            self.survey_dwell_start = None
            self._transition(MissionState.SURVEY)
            return VelocityCommand()
        if self.phase == "retreat":
            h = self.scene.human.center
            d = self._horizontal_dist_to_human()
            if d > m.human_hard_floor + 0.3:
                self._transition(self.phase_data["return_state"])
                return VelocityCommand()
            away = vec3(self.drone.position[0] - h[0], self.drone.position[1] - h[1], 0.0)
            n = math.hypot(away[0], away[1])
            away = away / n if n > 1e-9 else vec3(1.0, 0.0, 0.0)
            target = self.drone.position + away * 0.5
            return self._goto(target, self.drone.yaw)
        # replan: go straight back to the stored plan state
        self._transition(self.phase_data["return_state"])
        return VelocityCommand()

    def _tick_aborted(self):
        # Fly home and land for safety; remain terminal afterwards.
        m = self.cfg.mission
        home = self.scene.drone_home.position
        if self.phase == "return":
            target = vec3(home[0], home[1], m.cruise_altitude)
            if self._at(target, m.final_tolerance):
                self.phase = "land"
            return self._goto(target, self.drone.yaw)
        target = vec3(home[0], home[1], home[2])
        return self._goto(target, self.drone.yaw)

    # ------------------------------------------------------------------

    _HANDLERS = {
        MissionState.IDLE: _tick_idle,
        MissionState.TAKEOFF: _tick_takeoff,
        MissionState.SURVEY: _tick_survey,
        MissionState.LOCALIZE: _tick_localize,
        MissionState.PLAN_TO_OBJECT: _tick_plan_to_object,
        MissionState.NAVIGATE_TO_OBJECT: _tick_navigate_to_object,
        MissionState.GRASP: _tick_grasp,
        MissionState.PLAN_TO_HUMAN: _tick_plan_to_human,
        MissionState.NAVIGATE_TO_HUMAN: _tick_navigate_to_human,
        MissionState.HANDOVER: _tick_handover,
        MissionState.PLAN_TO_HOME: _tick_plan_to_home,
        MissionState.RETURN_HOME: _tick_return_home,
        MissionState.LAND: _tick_land,
        MissionState.RECOVERING: _tick_recovering,
        MissionState.ABORTED: _tick_aborted,
    }

    def check_safety(self):
        """Tick-level safety checks; may push the mission into recovery."""
        m = self.cfg.mission
        if self.state in (MissionState.HANDOVER, MissionState.RECOVERING, MissionState.ABORTED,
                          MissionState.COMPLETED, MissionState.IDLE):
            pass
        elif self._horizontal_dist_to_human() < m.human_hard_floor:
            self._recover("human-proximity", "retreat")
            return
        if self.state not in (MissionState.COMPLETED, MissionState.ABORTED, MissionState.IDLE,
                              MissionState.RECOVERING):
            if self.t - self.state_entered > m.timeout_for(self.state.value):
                self._recover("state-timeout", "replan")

    def step(self):
        """One control tick."""
        m = self.cfg.mission
        self._perceive()
        self.check_safety()
        cmd = self._HANDLERS[self.state](self)
        self.drone = step_dynamics(self.drone, cmd, m.control_dt, self.cfg.control)
        self.t = round(self.t + m.control_dt, 9)
        self.log.records.append(
            TickRecord(
                t=round(self.t, 6),
                x=float(self.drone.position[0]),
                y=float(self.drone.position[1]),
                z=float(self.drone.position[2]),
                yaw=float(self.drone.yaw),
                state=self.state.value,
                gripper=self.drone.gripper.value,
            )
        )

    def run(self) -> MissionLog:
        m = self.cfg.mission
        landed_after_abort = False
        while self.state != MissionState.COMPLETED:
            if self.state == MissionState.ABORTED and self.phase == "land" and self.drone.position[2] < 0.05:
                landed_after_abort = True
                break
            if self.t > m.mission_time_cap:
                self._fail("mission-time-cap")
                break
            self.step()
        if self.log.outcome is None:
            self.log.outcome = "failure"
            self.log.failure_mode = self.log.failure_mode or "incomplete"
        return self.log


def _world_to_body(v_world: np.ndarray, yaw: float) -> np.ndarray:
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([c * v_world[0] + s * v_world[1], -s * v_world[0] + c * v_world[1], v_world[2]])


def _with_gripper(state: DroneState, gripper: Gripper, payload) -> DroneState:
    return DroneState(
        position=state.position,
        yaw=state.yaw,
        velocity=state.velocity,
        yaw_rate=state.yaw_rate,
        gripper=gripper,
        payload=payload,
    )


def run_mission(scene: Scene, queue: TaskQueue, cfg: SimConfig, seed: int = 0,
                perception_dropouts=None) -> MissionLog:
    """Execute one mission and return its log. Deterministic in
    (scene, queue, cfg, seed)."""
    return MissionRunner(scene, queue, cfg, seed=seed, perception_dropouts=perception_dropouts).run()
