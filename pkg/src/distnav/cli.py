"""Command-line entry point: evolve1d, replay, simulate, metrics, print-config.

Exit codes: 0 success, 1 numerical failure at runtime, 2 configuration or
input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, dump_default_config, load_config
from .dataset import extract_partials, load_dataset
from .engine import SolverConfig, solve
from .errors import ConfigError, NumericalError
from .grids import TimeGrid
from .metrics import Thresholds, aggregate, classify_run
from .oracle import (
    GridDensity,
    exact_update,
    ks_distance,
    write_evolution_csv,
)
from .runlog import read_runlog, write_runlog
from .samples import SampleSet
from .simulator import human_baseline, run_interactive, run_replay

__all__ = ["main"]


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distnav",
        description="Distribution-space coupled prediction and planning tools.",
    )
    sub = parser.add_subparsers(required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="YAML config file")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--m", type=int, default=None, help="samples per agent")
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--no-timing", action="store_true", help="omit wall-time fields")

    p = sub.add_parser("print-config", help="print the full default configuration")
    p.set_defaults(func=lambda args: (print(dump_default_config(), end=""), 0)[1])

    p = sub.add_parser("evolve1d", parents=[common], help="evolve 1D densities")
    p.add_argument("--sweeps", type=int, default=None)
    p.add_argument("--compare-sampler", action="store_true")
    p.set_defaults(func=cmd_evolve1d)

    p = sub.add_parser("replay", parents=[common], help="partial-trajectory replay benchmark")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--frame-period", type=float, default=None)
    p.add_argument("--dry-run", action="store_true", help="list partial runs and stop")
    p.add_argument("--human-baseline", action="store_true")
    p.add_argument("--limit", type=int, default=None, help="run at most N partials")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("simulate", parents=[common], help="interactive social-force runs")
    p.add_argument("--pedestrians", type=int, default=None)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("metrics", help="recompute metrics from run logs")
    p.add_argument("--logs", type=Path, required=True, help="directory of run logs")
    p.add_argument("--out", type=Path, default=None, help="report file (default: stdout)")
    p.add_argument("--collision-dist", type=float, default=None)
    p.add_argument("--discomfort-dist", type=float, default=None)
    p.add_argument("--freezing-ratio", type=float, default=None)
    p.set_defaults(func=cmd_metrics)
    return parser


def _experiment_config(args, extra: dict | None = None) -> ExperimentConfig:
    overrides = {
        "seed": getattr(args, "seed", None),
        "samples_per_agent": getattr(args, "m", None),
        "out": str(args.out) if getattr(args, "out", None) else None,
    }
    overrides.update(extra or {})
    return load_config(getattr(args, "config", None), overrides)


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_evolve1d(args) -> int:
    extra = {"evolve1d.sweeps": args.sweeps} if args.sweeps is not None else {}
    cfg = _experiment_config(args, extra)
    out = _out_dir(cfg)
    ev = cfg.evolve1d

    widest = max(ev.sigmas)
    lo = min(ev.means) - ev.span_sigmas * widest
    hi = max(ev.means) + ev.span_sigmas * widest
    xs = np.linspace(lo, hi, ev.grid_points)
    densities = [GridDensity.gaussian(xs, mu, s) for mu, s in zip(ev.means, ev.sigmas)]
    history = exact_update(densities, cfg.collision, ev.sweeps)

    write_evolution_csv(history, out / "evolution.csv")
    with (out / "jc_trace.csv").open("w") as fh:
        fh.write("sweep,jc,kl_sum\n")
        for k, jc in enumerate(history.jc_trace):
            kl = repr(history.kl_trace[k - 1]) if k > 0 else ""
            fh.write(f"{k},{repr(jc)},{kl}\n")
    print(f"evolve1d: {len(ev.means)} agents, {ev.sweeps} sweeps -> {out}")

    if args.compare_sampler:
        m = cfg.samples_per_agent
        grid = TimeGrid(0.0, 1.0, 1)
        sets = []
        for k, (mu, s) in enumerate(zip(ev.means, ev.sigmas)):
            rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, k)))
            draws = mu + s * rng.standard_normal(m)
            sets.append(SampleSet(k, grid, draws[:, None, None], np.ones(m)))
        solve(sets, cfg.collision, SolverConfig(epsilon=0.0, max_sweeps=max(ev.sweeps, 1)))
        summary = {}
        for k, (gd, ss) in enumerate(zip(densities, sets)):
            summary[f"agent_{k}"] = ks_distance(gd, ss.trajectories[:, 0, 0], ss.weights)
        (out / "ks_summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        worst = max(summary.values())
        print(f"sampler comparison (m={m}): worst KS distance {worst:.4f}")
    return 0


def _classification(log, thresholds, no_timing):
    rc = classify_run(log, log.human_length, thresholds)
    if no_timing:
        rc.replan_times = []
    return rc


def _replay_worker(payload):
    idx, ds, partial, planner_cfg, replay_cfg, seed = payload
    return idx, run_replay(ds, partial, planner_cfg, replay_cfg, seed=seed)


def cmd_replay(args) -> int:
    cfg = _experiment_config(args)
    ds = load_dataset(args.dataset, frame_period=args.frame_period)
    partials = extract_partials(ds)
    if args.limit is not None:
        partials = partials[: args.limit]
    if args.dry_run:
        print(f"{len(partials)} partial runs:")
        for k, p in enumerate(partials):
            print(
                f"  run_{k:04d}: pedestrian {p.ped_id}, frames {p.start_frame}-{p.end_frame}, "
                f"{p.human_length:.2f} m"
            )
        return 0
    if not partials:
        raise ConfigError("dataset yields no partial runs")

    out = _out_dir(cfg)
    planner_cfg = cfg.planner_config()
    payloads = [
        (k, ds, p, planner_cfg, cfg.replay, cfg.seed + k) for k, p in enumerate(partials)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = dict(pool.map(_replay_worker, payloads))
        logs = [results[k] for k in range(len(partials))]
    else:
        logs = [_replay_worker(p)[1] for p in payloads]

    include_timing = not args.no_timing
    classifications = []
    for k, log in enumerate(logs):
        write_runlog(
            log, out / f"run_{k:04d}.csv", out / f"run_{k:04d}.summary.json", include_timing
        )
        classifications.append(_classification(log, cfg.thresholds, args.no_timing))
    report = aggregate(classifications)
    (out / "metrics_report.json").write_text(report.to_json())
    table = report.to_table("distnav")

    if args.human_baseline:
        human = [
            _classification(human_baseline(ds, p), cfg.thresholds, args.no_timing)
            for p in partials
        ]
        human_report = aggregate(human)
        (out / "human_report.json").write_text(human_report.to_json())
        table += human_report.to_table("human").splitlines()[1] + "\n"

    (out / "metrics_table.txt").write_text(table)
    print(table, end="")
    timeouts = sum(1 for log in logs if log.outcome == "timeout")
    print(f"{len(logs)} runs written to {out} ({timeouts} timeouts)")
    return 0


def _simulate_worker(payload):
    idx, scenario, planner_cfg, seed = payload
    return idx, run_interactive(scenario, planner_cfg, seed=seed)


def cmd_simulate(args) -> int:
    extra = {}
    if args.pedestrians is not None:
        extra["scenario.n_pedestrians"] = args.pedestrians
    cfg = _experiment_config(args, extra)
    if args.runs < 1:
        raise ConfigError("--runs must be >= 1")
    out = _out_dir(cfg)
    scenario = cfg.scenario_config()
    planner_cfg = cfg.planner_config()
    payloads = [(k, scenario, planner_cfg, cfg.seed + k) for k in range(args.runs)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = dict(pool.map(_simulate_worker, payloads))
        logs = [results[k] for k in range(args.runs)]
    else:
        logs = [_simulate_worker(p)[1] for p in payloads]

    include_timing = not args.no_timing
    classifications = []
    for k, log in enumerate(logs):
        write_runlog(
            log, out / f"run_{k:04d}.csv", out / f"run_{k:04d}.summary.json", include_timing
        )
        classifications.append(_classification(log, cfg.thresholds, args.no_timing))
    report = aggregate(classifications)

    arrived = [log for log in logs if log.outcome == "arrived"]
    summary = {
        "runs": args.runs,
        "pedestrians": scenario.n_pedestrians,
        "arrived": len(arrived),
        "arrived_pct": 100.0 * len(arrived) / args.runs,
        "collisions": sum(1 for c in classifications if c.collision),
        "mean_time_to_goal_s": (
            float(np.mean([log.duration for log in arrived])) if arrived else None
        ),
        "metrics": report.to_dict(),
    }
    (out / "simulation_report.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(report.to_table("distnav"), end="")
    print(
        f"{summary['arrived']}/{args.runs} arrived, {summary['collisions']} collision runs, "
        f"mean time to goal {summary['mean_time_to_goal_s']}"
    )
    return 0


def cmd_metrics(args) -> int:
    overrides = {
        "collision_dist": args.collision_dist,
        "discomfort_dist": args.discomfort_dist,
        "freezing_ratio": args.freezing_ratio,
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        thresholds = replace(Thresholds(), **overrides)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    logs_dir = Path(args.logs)
    if not logs_dir.is_dir():
        raise ConfigError(f"not a directory: {logs_dir}")
    csvs = sorted(p for p in logs_dir.glob("run_*.csv"))
    runs = []
    for csv_path in csvs:
        summary_path = csv_path.parent / (csv_path.stem + ".summary.json")
        runs.append(read_runlog(csv_path, summary_path))
    if not runs:
        raise ConfigError(f"no run logs found in {logs_dir}")
    classifications = [classify_run(r, r.human_length, thresholds) for r in runs]
    report = aggregate(classifications)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
        print(f"report written to {args.out}")
    else:
        print(text, end="")
    return 0


if __name__ == "__main__":
    sys.exit(main())
