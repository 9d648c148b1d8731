"""Recorded-trajectory datasets and the partial-run extraction protocol.

Dataset files are plain text, one record per line: ``frame_id pedestrian_id x y``
(whitespace- or comma-separated). The frame period comes from a sidecar YAML
(``<file>.meta.yaml`` with a ``frame_period_s`` key) or defaults to 0.4 s.

A partial run is a roughly 10 m stretch of one pedestrian's recording; the
benchmark removes that pedestrian, hands its start and end to the robot, and
replays everyone else verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .errors import ConfigError

__all__ = ["TrajectoryDataset", "PartialRun", "load_dataset", "extract_partials"]

DEFAULT_FRAME_PERIOD = 0.4

MIN_RUN_LENGTH = 8.0
TARGET_RUN_LENGTH = 10.0
MAX_RUN_LENGTH = 12.0


@dataclass
class TrajectoryDataset:
    """Per-pedestrian recorded frames and positions, sorted by frame."""

    frame_period: float
    tracks: dict = field(default_factory=dict)  # ped_id -> (frames (k,), xy (k,2))

    def pedestrians(self) -> list:
        return sorted(self.tracks)

    def frames(self) -> np.ndarray:
        all_frames = np.concatenate([f for f, _ in self.tracks.values()])
        return np.unique(all_frames)

    def position_at(self, ped_id: int, frame: int) -> np.ndarray | None:
        frames, xy = self.tracks[ped_id]
        idx = np.searchsorted(frames, frame)
        if idx < frames.size and frames[idx] == frame:
            return xy[idx]
        return None

    def present_at(self, frame: int) -> list:
        return [p for p in self.pedestrians() if self.position_at(p, frame) is not None]


def load_dataset(path, frame_period: float | None = None) -> TrajectoryDataset:
    """Parse a dataset file; malformed records raise ConfigError with the line number."""
    path = Path(path)
    if frame_period is None:
        frame_period = _sidecar_frame_period(path)
    rows = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.replace(",", " ").split()
            if len(parts) != 4:
                raise ConfigError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
            try:
                frame = int(float(parts[0]))
                ped = int(float(parts[1]))
                x, y = float(parts[2]), float(parts[3])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from None
            if not (np.isfinite(x) and np.isfinite(y)):
                raise ConfigError(f"{path}:{lineno}: non-finite position")
            rows.append((frame, ped, x, y))
    if not rows:
        raise ConfigError(f"{path}: dataset contains no records")

    by_ped: dict[int, list] = {}
    for frame, ped, x, y in rows:
        by_ped.setdefault(ped, []).append((frame, x, y))
    tracks = {}
    for ped, recs in by_ped.items():
        recs.sort(key=lambda r: r[0])
        frames = np.array([r[0] for r in recs], dtype=int)
        if np.any(np.diff(frames) <= 0):
            raise ConfigError(f"{path}: pedestrian {ped} has duplicate frames")
        xy = np.array([(r[1], r[2]) for r in recs], dtype=float)
        tracks[ped] = (frames, xy)
    return TrajectoryDataset(frame_period=float(frame_period), tracks=tracks)


def _sidecar_frame_period(path: Path) -> float:
    sidecar = path.with_suffix(path.suffix + ".meta.yaml")
    if sidecar.exists():
        meta = yaml.safe_load(sidecar.read_text()) or {}
        return float(meta.get("frame_period_s", DEFAULT_FRAME_PERIOD))
    return DEFAULT_FRAME_PERIOD


@dataclass(frozen=True)
class PartialRun:
    """A ~10 m stretch of one pedestrian's recording."""

    ped_id: int
    start_frame: int
    end_frame: int
    path: np.ndarray = field(repr=False)  # recorded positions, (k, 2)

    def __post_init__(self):
        arc = arc_length(self.path)
        if not (MIN_RUN_LENGTH <= arc <= MAX_RUN_LENGTH):
            raise ValueError(f"partial run arc length {arc:.2f} m outside [8, 12] m")

    @property
    def human_length(self) -> float:
        return arc_length(self.path)

    @property
    def start(self) -> np.ndarray:
        return self.path[0]

    @property
    def goal(self) -> np.ndarray:
        return self.path[-1]


def arc_length(positions: np.ndarray) -> float:
    positions = np.asarray(positions, dtype=float)
    if positions.ndim != 2 or positions.shape[0] < 2:
        return 0.0
    return float(np.sum(np.linalg.norm(np.diff(positions, axis=0), axis=1)))


def extract_partials(ds: TrajectoryDataset) -> list[PartialRun]:
    """Greedy non-overlapping ~10 m segments from every pedestrian's recording.

    Walking each track from the start, a segment closes as soon as its arc
    length reaches 10 m (kept when it lands within [8, 12] m); a trailing
    segment shorter than 10 m is kept when it is at least 8 m.
    """
    if not ds.tracks:
        raise ConfigError("empty dataset")
    partials = []
    for ped in ds.pedestrians():
        frames, xy = ds.tracks[ped]
        start = 0
        arc = 0.0
        for k in range(1, frames.size):
            arc += float(np.linalg.norm(xy[k] - xy[k - 1]))
            if arc >= TARGET_RUN_LENGTH:
                if arc <= MAX_RUN_LENGTH:
                    partials.append(
                        PartialRun(ped, int(frames[start]), int(frames[k]), xy[start : k + 1])
                    )
                # either way restart after the crossing frame
                start = k
                arc = 0.0
        if arc >= MIN_RUN_LENGTH:
            partials.append(
                PartialRun(ped, int(frames[start]), int(frames[-1]), xy[start:])
            )
    return partials
