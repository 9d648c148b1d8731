import numpy as np
import pytest

from distnav.dataset import (
    PartialRun,
    arc_length,
    extract_partials,
    load_dataset,
)
from distnav.errors import ConfigError


def write_dataset(tmp_path, lines, name="ds.txt"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return path


def straight_walker(ped_id, n_frames, step=0.52, y=0.0, start_frame=0):
    return [
        f"{start_frame + k} {ped_id} {k * step:.6f} {y}" for k in range(n_frames)
    ]


class TestLoadDataset:
    def test_whitespace_and_comma_formats(self, tmp_path):
        path = write_dataset(tmp_path, ["0 1 0.0 0.0", "1,1,0.5,0.0", "2\t1\t1.0\t0.0"])
        ds = load_dataset(path)
        assert ds.pedestrians() == [1]
        frames, xy = ds.tracks[1]
        assert list(frames) == [0, 1, 2]
        assert xy[1][0] == 0.5

    def test_bad_record_reports_line_number(self, tmp_path):
        path = write_dataset(tmp_path, ["0 1 0.0 0.0", "not a record"])
        with pytest.raises(ConfigError, match=":2"):
            load_dataset(path)

    def test_wrong_field_count_reports_line_number(self, tmp_path):
        path = write_dataset(tmp_path, ["0 1 0.0"])
        with pytest.raises(ConfigError, match=":1"):
            load_dataset(path)

    def test_empty_dataset_rejected(self, tmp_path):
        path = write_dataset(tmp_path, ["# only a comment"])
        with pytest.raises(ConfigError):
            load_dataset(path)

    def test_duplicate_frames_rejected(self, tmp_path):
        path = write_dataset(tmp_path, ["0 1 0.0 0.0", "0 1 1.0 0.0"])
        with pytest.raises(ConfigError, match="duplicate"):
            load_dataset(path)

    def test_sidecar_frame_period(self, tmp_path):
        path = write_dataset(tmp_path, ["0 1 0.0 0.0", "1 1 0.5 0.0"])
        (tmp_path / "ds.txt.meta.yaml").write_text("frame_period_s: 0.25\n")
        assert load_dataset(path).frame_period == 0.25

    def test_default_frame_period(self, tmp_path):
        path = write_dataset(tmp_path, ["0 1 0.0 0.0"])
        assert load_dataset(path).frame_period == 0.4

    def test_explicit_period_overrides_sidecar(self, tmp_path):
        path = write_dataset(tmp_path, ["0 1 0.0 0.0"])
        (tmp_path / "ds.txt.meta.yaml").write_text("frame_period_s: 0.25\n")
        assert load_dataset(path, frame_period=1.0).frame_period == 1.0


class TestArcLength:
    def test_single_point_is_zero(self):
        assert arc_length(np.array([[1.0, 2.0]])) == 0.0

    def test_open_unit_square(self):
        pts = np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float)
        assert arc_length(pts) == pytest.approx(3.0)
        closed = np.vstack([pts, pts[:1]])
        assert arc_length(closed) == pytest.approx(4.0)


class TestExtractPartials:
    def test_thirty_meter_walk_gives_three_partials(self, tmp_path):
        path = write_dataset(tmp_path, straight_walker(1, 58))  # 57 * 0.52 = 29.64 m
        partials = extract_partials(load_dataset(path))
        assert len(partials) == 3
        for p in partials:
            assert 8.0 <= p.human_length <= 12.0

    def test_five_meter_walk_gives_none(self, tmp_path):
        path = write_dataset(tmp_path, straight_walker(1, 10))  # 4.7 m
        assert extract_partials(load_dataset(path)) == []

    def test_twelve_meter_walk_gives_one(self, tmp_path):
        path = write_dataset(tmp_path, straight_walker(1, 24))  # 11.96 m
        partials = extract_partials(load_dataset(path))
        assert len(partials) == 1

    def test_partials_are_non_overlapping_and_greedy(self, tmp_path):
        path = write_dataset(tmp_path, straight_walker(1, 58))
        partials = extract_partials(load_dataset(path))
        for a, b in zip(partials, partials[1:]):
            assert a.end_frame == b.start_frame

    def test_arc_consistency_with_path_arc_length(self, tmp_path):
        path = write_dataset(tmp_path, straight_walker(1, 58))
        for p in extract_partials(load_dataset(path)):
            assert p.human_length == arc_length(p.path)

    def test_empty_tracks_rejected(self):
        from distnav.dataset import TrajectoryDataset

        with pytest.raises(ConfigError):
            extract_partials(TrajectoryDataset(0.4, {}))

    def test_teleport_segment_dropped(self, tmp_path):
        # a 13 m jump makes the crossing segment land outside [8, 12]
        lines = ["0 1 0.0 0.0", "1 1 1.0 0.0", "2 1 2.0 0.0", "3 1 15.0 0.0"]
        lines += [f"{4 + k} 1 {15.0 + 0.52 * (k + 1):.4f} 0.0" for k in range(20)]
        path = write_dataset(tmp_path, lines)
        partials = extract_partials(load_dataset(path))
        assert len(partials) == 1  # only the clean post-jump stretch (10.4 m)
        assert partials[0].start_frame == 3

    def test_partial_run_validates_length(self):
        with pytest.raises(ValueError):
            PartialRun(1, 0, 1, np.array([[0.0, 0.0], [1.0, 0.0]]))
