"""Command-line entry point.

Subcommands:
  run       execute one or more missions and write reports/plots
  plan      plan a single leg without running dynamics
  validate  schema + invariant check of a scene file

Exit codes: 0 ok, 2 config/scene error, 3 prompt error, 4 planning error.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .config import ConfigError, SimConfig, apply_overrides, env_overrides, with_handover_mode
from .grammar import PromptError, UnknownObjectError, parse_prompt
from .metrics import aggregate_reports, compute_metrics
from .mission import run_mission
from .planner import CircularObstacle, PlanningError, RectObstacle, plan_leg, rasterize
from .reporting import (
    ensure_dir,
    write_aggregate_json,
    write_grid_pgm,
    write_mission_svg,
    write_plan_svg,
    write_report_json,
    write_trajectory_csv,
    write_waypoints_csv,
)
from .scene import SceneError, default_scene, load as load_scene, randomize_objects, validate as validate_scene

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROMPT = 3
EXIT_PLANNING = 4


def _load_scene_arg(path: str | None):
    if path is None:
        return default_scene()
    return load_scene(path)


def _build_config(args) -> SimConfig:
    cfg = SimConfig()
    overrides = env_overrides()
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    cfg = apply_overrides(cfg, overrides)
    if getattr(args, "handover_mode", None):
        cfg = with_handover_mode(cfg, args.handover_mode)
    return cfg


def cmd_run(args) -> int:
    try:
        scene = _load_scene_arg(args.scene)
        cfg = _build_config(args)
    except (SceneError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    nouns, adjectives = scene.vocabulary()
    try:
        queue = parse_prompt(args.prompt, nouns, adjectives)
    except (PromptError, UnknownObjectError) as exc:
        print(f"prompt error: {exc}", file=sys.stderr)
        return EXIT_PROMPT
    ensure_dir(args.out_dir)
    human_ring = cfg.planner.human_inflation(scene.human.body_radius)
    reports = []
    for trial in range(args.trials):
        trial_scene = scene
        if args.trials > 1:
            rng = np.random.default_rng([args.seed, trial])
            trial_scene = randomize_objects(scene, rng)
        log = run_mission(trial_scene, queue, cfg, seed=args.seed + trial)
        m = compute_metrics(log)
        reports.append(m)
        meta = {
            "prompt": args.prompt,
            "seed": args.seed,
            "trial": trial,
            "version": __version__,
        }
        stem = f"{args.out_dir}/trial_{trial:03d}"
        write_report_json(f"{stem}_report.json", log, m, meta)
        write_trajectory_csv(f"{stem}_trajectory.csv", log)
        write_mission_svg(f"{stem}_plot.svg", trial_scene, log, human_ring)
        print(f"trial {trial}: {log.outcome_str()} (duration {m.duration:.1f} s, "
              f"min clearance {m.min_human_clearance:.2f} m)")
    if args.trials > 1:
        write_aggregate_json(f"{args.out_dir}/aggregate_metrics.json", aggregate_reports(reports))
    return EXIT_OK


def _resolve_endpoint(scene, spec: str):
    if spec == "home":
        p = scene.drone_home.position
        return float(p[0]), float(p[1])
    if spec == "human":
        return float(scene.human.center[0]), float(scene.human.center[1])
    if spec.startswith("object:"):
        try:
            o = scene.object_by_id(spec.split(":", 1)[1])
        except KeyError:
            raise SceneError(f"no object with id {spec.split(':', 1)[1]!r}")
        return float(o.position[0]), float(o.position[1])
    raise SceneError(f"bad endpoint {spec!r} (expected home, human, or object:<id>)")


def cmd_plan(args) -> int:
    try:
        scene = _load_scene_arg(args.scene)
        cfg = _build_config(args)
        start = _resolve_endpoint(scene, getattr(args, "from"))
        goal = _resolve_endpoint(scene, args.to)
    except (SceneError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    p = cfg.planner
    human = scene.human
    circles = [CircularObstacle(float(human.center[0]), float(human.center[1]), p.human_inflation(human.body_radius))]
    t = scene.table
    rects = [RectObstacle(float(t.center[0]), float(t.center[1]),
                          float(t.half_extents[0]) + p.drone_radius,
                          float(t.half_extents[1]) + p.drone_radius)]
    grid = rasterize(scene.bounds, p.resolution, circles, rects)
    try:
        path = plan_leg(grid, start, goal)
    except PlanningError as exc:
        print(f"planning error: {exc}", file=sys.stderr)
        return EXIT_PLANNING
    ensure_dir(args.out_dir)
    write_waypoints_csv(f"{args.out_dir}/waypoints.csv", path)
    write_grid_pgm(f"{args.out_dir}/grid.pgm", grid)
    write_plan_svg(f"{args.out_dir}/plan.svg", scene, path, p.human_inflation(human.body_radius))
    print(f"planned {len(path.waypoints)} waypoints, cost {path.cost:.3f} m")
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        scene = load_scene(args.scene)
    except (SceneError, OSError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    violations = validate_scene(scene)
    if violations:
        for v in violations:
            print(f"violation: {v}", file=sys.stderr)
        return EXIT_CONFIG
    print("OK")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dronefetch", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one or more missions")
    p_run.add_argument("--scene", help="scene JSON file (default: built-in lab scene)")
    p_run.add_argument("--prompt", required=True, help="natural-language command")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--trials", type=int, default=1)
    p_run.add_argument("--out-dir", default="out")
    p_run.add_argument("--handover-mode", choices=["facing", "eq4"])
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="config override, e.g. control.kp_pos=0.5")
    p_run.set_defaults(func=cmd_run)

    p_plan = sub.add_parser("plan", help="plan a single leg")
    p_plan.add_argument("--scene", help="scene JSON file (default: built-in lab scene)")
    p_plan.add_argument("--from", required=True, help="home | human | object:<id>")
    p_plan.add_argument("--to", required=True, help="home | human | object:<id>")
    p_plan.add_argument("--out-dir", default="out")
    p_plan.add_argument("--set", action="append", metavar="KEY=VALUE")
    p_plan.set_defaults(func=cmd_plan)

    p_val = sub.add_parser("validate", help="validate a scene file")
    p_val.add_argument("scene", help="scene JSON file")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
