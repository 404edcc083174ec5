"""Command line interface: run episodes, batches, replays, scenario
regressions, and standalone world generation.

Exit codes: 0 success, 1 episode/replay/scenario failure, 2 invalid config.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import world as gw
from .harness import (
    ConfigError, ReplayError, config_from_dict, load_config, replay,
    run_batch, run_episode, write_summary_csv,
)
from .scenarios import scenario_regressions


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config.world.seed = args.seed
    record = run_episode(config, out_dir=args.out)
    print(f"planner={record.planner} steps={record.total_steps} "
          f"coverage={record.final_coverage_m2:.2f} m^2 "
          f"collisions={record.collisions} termination={record.termination}")
    return 0


def _cmd_batch(args) -> int:
    with open(args.configs, "r", encoding="utf-8") as fh:
        docs = json.load(fh)
    if not isinstance(docs, list):
        raise ConfigError("batch config file must contain a JSON list")
    configs = [config_from_dict(doc) for doc in docs]
    results, summary = run_batch(
        configs, repetitions=args.reps, parallelism=args.parallelism,
        out_dir=args.out,
    )
    failures = [r for r in results if not r["ok"]]
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        write_summary_csv(summary, str(Path(args.out) / "summary.csv"))
    for row in summary:
        if row["step"] == max(r["step"] for r in summary
                              if r["config_index"] == row["config_index"]):
            print(f"config {row['config_index']} [{row['planner']} on "
                  f"{row['generator']}]: mean {row['coverage_mean_m2']:.1f} m^2, "
                  f"rate {row['rate_mean_m2_per_min']:.1f} m^2/min")
    if failures:
        print(f"{len(failures)} episode(s) failed", file=sys.stderr)
        return 1
    return 0


def _cmd_replay(args) -> int:
    result = replay(args.log, verify=args.verify)
    print(f"cycles={result.cycles} steps={result.steps} "
          f"truncated={result.truncated} mismatches={result.score_mismatches}")
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return 0 if result.ok else 1


def _cmd_scenarios(args) -> int:
    results = scenario_regressions()
    ok = True
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] {res.name}: {json.dumps(res.details, sort_keys=True)}")
        ok = ok and res.passed
    return 0 if ok else 1


def _cmd_gen_world(args) -> int:
    if args.generator == "subway":
        world = gw.generate_subway(
            args.seed, rooms=args.rooms,
            room_size_range=(args.room_min, args.room_max),
        )
    elif args.generator == "maze":
        world = gw.generate_maze(
            args.seed, width=args.width, height=args.height,
            deadend_fraction=args.deadend_fraction,
        )
    else:
        world = gw.generate_cave(
            args.seed, width=args.width, height=args.height,
            risk_intensity=args.risk_intensity,
        )
    gw.save_world(world, args.out)
    print(f"{args.generator} world ({world.width}x{world.height}, "
          f"{world.free_cell_count()} free cells) -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridexplore",
        description="Deterministic grid-world exploration simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single episode")
    p_run.add_argument("--config", required=True, help="run config JSON path")
    p_run.add_argument("--seed", type=int, default=None, help="world seed override")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.set_defaults(func=_cmd_run)

    p_batch = sub.add_parser("batch", help="run a batch of configured episodes")
    p_batch.add_argument("--configs", required=True, help="JSON list of run configs")
    p_batch.add_argument("--reps", type=int, default=1)
    p_batch.add_argument("--parallelism", type=int, default=1)
    p_batch.add_argument("--out", default=None)
    p_batch.set_defaults(func=_cmd_batch)

    p_replay = sub.add_parser("replay", help="replay and check an event log")
    p_replay.add_argument("--log", required=True)
    p_replay.add_argument("--verify", action="store_true",
                          help="re-run the episode and compare event streams")
    p_replay.set_defaults(func=_cmd_replay)

    p_scen = sub.add_parser("scenarios", help="run the scripted regression scenarios")
    p_scen.set_defaults(func=_cmd_scenarios)

    p_gen = sub.add_parser("gen-world", help="generate and save a world")
    p_gen.add_argument("--generator", required=True,
                       choices=("subway", "maze", "cave"))
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--rooms", type=int, default=5)
    p_gen.add_argument("--room-min", type=float, default=6.0)
    p_gen.add_argument("--room-max", type=float, default=10.0)
    p_gen.add_argument("--width", type=int, default=51)
    p_gen.add_argument("--height", type=int, default=51)
    p_gen.add_argument("--deadend-fraction", type=float, default=1.0)
    p_gen.add_argument("--risk-intensity", type=float, default=0.5)
    p_gen.set_defaults(func=_cmd_gen_world)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 2
    except ReplayError as exc:
        print(f"replay error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - episode failures exit 1, not crash
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
