import pytest
import yaml

from distnav.config import default_config_dict, dump_default_config, load_config
from distnav.errors import ConfigError


class TestLoadConfig:
    def test_defaults_without_file(self):
        cfg = load_config(None)
        assert cfg.seed == 0
        assert cfg.samples_per_agent == 100
        assert cfg.collision.sigma == 0.35
        assert cfg.thresholds.collision_dist == 0.21

    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("seed: 7\ncollision:\n  sigma: 0.5\nscenario:\n  n_pedestrians: 9\n")
        cfg = load_config(path)
        assert cfg.seed == 7
        assert cfg.collision.sigma == 0.5
        assert cfg.scenario.n_pedestrians == 9
        assert cfg.collision.weight == 10.0  # untouched default

    def test_cli_overrides_beat_file(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("seed: 7\n")
        cfg = load_config(path, {"seed": 9, "scenario.n_pedestrians": 2})
        assert cfg.seed == 9
        assert cfg.scenario.n_pedestrians == 2

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("plannerr:\n  dt: 0.4\n")
        with pytest.raises(ConfigError, match="plannerr"):
            load_config(path)

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("collision:\n  sgma: 0.5\n")
        with pytest.raises(ConfigError, match="sgma"):
            load_config(path)

    def test_invalid_value_rejected(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("collision:\n  sigma: -1\n")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_negative_seed_rejected(self):
        with pytest.raises(ConfigError):
            load_config(None, {"seed": -1})

    def test_m_below_one_rejected(self):
        with pytest.raises(ConfigError):
            load_config(None, {"samples_per_agent": 0})

    def test_missing_file_reports_path(self, tmp_path):
        with pytest.raises(ConfigError, match="nope.yaml"):
            load_config(tmp_path / "nope.yaml")

    def test_malformed_yaml_rejected(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("a: [unclosed\n")
        with pytest.raises(ConfigError):
            load_config(path)


class TestPlannerAssembly:
    def test_shared_sections_flow_into_planner(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(
            "samples_per_agent: 33\ngp:\n  length_scale: 2.5\ncollision:\n  weight: 4.0\n"
            "solver:\n  max_sweeps: 7\n"
        )
        pc = load_config(path).planner_config()
        assert pc.samples_per_agent == 33
        assert pc.kernel.length_scale == 2.5
        assert pc.collision.weight == 4.0
        assert pc.solver.max_sweeps == 7

    def test_sfm_flows_into_scenario(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text("sfm:\n  desired_speed: 1.0\n")
        sc = load_config(path).scenario_config()
        assert sc.sfm.desired_speed == 1.0


class TestDefaultDump:
    def test_dump_parses_and_round_trips(self):
        text = dump_default_config()
        data = yaml.safe_load(text)
        assert data == default_config_dict()

    def test_dump_is_loadable_config(self, tmp_path):
        path = tmp_path / "c.yaml"
        path.write_text(dump_default_config())
        cfg = load_config(path)
        assert cfg == load_config(None)
