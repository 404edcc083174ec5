"""Closed-loop episodes: the switching planner against its baselines on one
maze, then a replay check on the event log.

Episodes are deterministic in their config, so the replay can re-run the
episode from the log's embedded config and demand a byte-identical stream.
"""
import tempfile
from pathlib import Path

from gridexplore import RunConfig, WorldSpec, replay, run_batch, run_episode
from gridexplore.harness import write_summary_csv


def config(planner):
    return RunConfig(
        world=WorldSpec(generator="maze", seed=3,
                        params={"width": 41, "height": 41, "deadend_fraction": 1.0}),
        planner=planner, step_budget=400,
        min_frontier_cluster=1, horizon_global=40, nbv_samples=20,
    )


print(f"{'planner':8} {'steps':>6} {'coverage m^2':>13} {'rate m^2/min':>13} "
      f"{'termination':>14}")
for planner in ("MLDM", "HCP", "NBV", "HFE"):
    rec = run_episode(config(planner))
    minutes = max(rec.total_steps, 1) / 60
    print(f"{planner:8} {rec.total_steps:>6} {rec.final_coverage_m2:>13.1f} "
          f"{rec.final_coverage_m2 / minutes:>13.1f} {rec.termination:>14}")

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "episode"
    run_episode(config("MLDM"), out_dir=str(out))
    result = replay(str(out / "events.ndjson"), verify=True)
    print(f"\nreplay of the MLDM log: {result.cycles} cycles, {result.steps} steps, "
          f"verified={'ok' if result.ok else 'MISMATCH'}")

    results, summary = run_batch([config("MLDM"), config("NBV")],
                                 repetitions=2, parallelism=2)
    csv_path = Path(tmp) / "summary.csv"
    write_summary_csv(summary, str(csv_path))
    finals = [row for row in summary
              if row["step"] == max(r["step"] for r in summary
                                    if r["config_index"] == row["config_index"])]
    print("\nbatch of 2 configs x 2 repetitions (seed offset per repetition):")
    for row in finals:
        print(f"  {row['planner']:5} mean {row['coverage_mean_m2']:.1f} m^2 "
              f"[{row['coverage_min_m2']:.1f}, {row['coverage_max_m2']:.1f}] "
              f"rate {row['rate_mean_m2_per_min']:.1f} m^2/min")
