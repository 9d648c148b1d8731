"""Run logs and their on-disk form.

Each run produces one CSV (row per agent per step: ``t, agent_id, x, y,
min_sep, replan_ms``; the separation and timing columns are filled on the
robot's row) plus a JSON summary. Floats are written with ``repr`` so a
reloaded log reproduces the in-memory values bit for bit.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grids import Trajectory
from .world import WorldState

__all__ = ["RunLogStep", "RunLog", "write_runlog", "read_runlog"]

ARRIVED = "arrived"
TIMEOUT = "timeout"


@dataclass
class RunLogStep:
    time: float
    world: WorldState
    plan: Trajectory | None
    replan_s: float
    min_sep: float  # NaN when no pedestrian is present


@dataclass
class RunLog:
    steps: list = field(default_factory=list)
    outcome: str = ARRIVED
    seed: int | None = None
    robot_id: int = -1
    human_length: float | None = None  # recorded path length, replay runs only

    def robot_positions(self) -> np.ndarray:
        return np.array([s.world.get(self.robot_id).pos for s in self.steps])

    def min_sep_series(self) -> np.ndarray:
        return np.array([s.min_sep for s in self.steps])

    def replan_times(self) -> list:
        return [s.replan_s for s in self.steps if s.plan is not None]

    @property
    def duration(self) -> float:
        if len(self.steps) < 2:
            return 0.0
        return self.steps[-1].time - self.steps[0].time


def _fmt(x: float) -> str:
    return repr(float(x))


def write_runlog(log: RunLog, csv_path, summary_path, include_timing: bool = True) -> None:
    csv_path, summary_path = Path(csv_path), Path(summary_path)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "agent_id", "x", "y", "min_sep", "replan_ms"])
        for step in log.steps:
            for agent in step.world.agents:
                is_robot = agent.id == log.robot_id
                min_sep = _fmt(step.min_sep) if is_robot and not math.isnan(step.min_sep) else ""
                replan_ms = ""
                if is_robot and step.plan is not None and include_timing:
                    replan_ms = _fmt(step.replan_s * 1000.0)
                writer.writerow(
                    [_fmt(step.time), agent.id, _fmt(agent.pos[0]), _fmt(agent.pos[1]), min_sep, replan_ms]
                )

    from .dataset import arc_length  # local import to avoid a cycle

    summary = {
        "outcome": log.outcome,
        "seed": log.seed,
        "robot_id": log.robot_id,
        "steps": len(log.steps),
        "duration_s": log.duration,
        "robot_path_length_m": arc_length(log.robot_positions()),
        "human_path_length_m": log.human_length,
    }
    if include_timing:
        times = log.replan_times()
        summary["mean_replan_s"] = float(np.mean(times)) if times else None
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


@dataclass
class LoadedRun:
    """A run rebuilt from disk; mirrors the RunLog surface metrics consume."""

    times: np.ndarray
    robot_xy: np.ndarray
    min_sep: np.ndarray
    replan_s: list
    outcome: str
    seed: int | None
    robot_id: int
    human_length: float | None

    # duck-typed RunLog surface
    def robot_positions(self) -> np.ndarray:
        return self.robot_xy

    def min_sep_series(self) -> np.ndarray:
        return self.min_sep

    def replan_times(self) -> list:
        return self.replan_s

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0]) if self.times.size >= 2 else 0.0


def read_runlog(csv_path, summary_path) -> LoadedRun:
    csv_path, summary_path = Path(csv_path), Path(summary_path)
    try:
        summary = json.loads(summary_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read run summary {summary_path}: {exc}") from None
    robot_id = int(summary["robot_id"])

    times, xy, seps, replans = [], [], [], []
    with csv_path.open() as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:4] != ["t", "agent_id", "x", "y"]:
            raise ConfigError(f"{csv_path}: not a run log")
        for row in reader:
            if int(row[1]) != robot_id:
                continue
            times.append(float(row[0]))
            xy.append((float(row[2]), float(row[3])))
            seps.append(float(row[4]) if row[4] else math.nan)
            if row[5]:
                replans.append(float(row[5]) / 1000.0)
    if not times:
        raise ConfigError(f"{csv_path}: log contains no robot rows")
    return LoadedRun(
        times=np.asarray(times),
        robot_xy=np.asarray(xy),
        min_sep=np.asarray(seps),
        replan_s=replans,
        outcome=summary["outcome"],
        seed=summary.get("seed"),
        robot_id=robot_id,
        human_length=summary.get("human_path_length_m"),
    )
