"""Experiment configuration: defaults, YAML loading, and validation.

One structured file covers every section (planner, GP kernel, collision
kernel, solver, social-force parameters, scenario geometry, replay protocol,
metric thresholds, and the 1D evolution problem). Unknown keys are rejected
so typos fail loudly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .collision import CollisionKernel
from .engine import SolverConfig
from .errors import ConfigError
from .gp import KernelParams
from .metrics import Thresholds
from .planner import PlannerConfig
from .sfm import SfmParams
from .simulator import ReplayConfig, ScenarioConfig

__all__ = ["ExperimentConfig", "load_config", "default_config_dict", "dump_default_config"]

_MAX_SEED = 2**63 - 1


@dataclass(frozen=True)
class Evolve1dConfig:
    means: tuple = (-1.0, 0.0, 1.0)
    sigmas: tuple = (0.5, 0.5, 0.5)
    sweeps: int = 10
    grid_points: int = 2001
    span_sigmas: float = 8.0

    def __post_init__(self):
        if len(self.means) < 1 or len(self.means) != len(self.sigmas):
            raise ValueError("means and sigmas must be equal-length, non-empty")
        if any(s <= 0 for s in self.sigmas):
            raise ValueError("sigmas must be positive")
        if self.sweeps < 0 or self.grid_points < 3 or self.span_sigmas <= 0:
            raise ValueError("invalid evolve1d configuration")


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    samples_per_agent: int = 100
    out: str = "runs"
    gp: KernelParams = field(default_factory=KernelParams)
    collision: CollisionKernel = field(default_factory=CollisionKernel)
    solver: SolverConfig = field(default_factory=SolverConfig)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    sfm: SfmParams = field(default_factory=SfmParams)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    replay: ReplayConfig = field(default_factory=ReplayConfig)
    thresholds: Thresholds = field(default_factory=Thresholds)
    evolve1d: Evolve1dConfig = field(default_factory=Evolve1dConfig)

    def __post_init__(self):
        if not (0 <= self.seed <= _MAX_SEED):
            raise ValueError(f"seed must be a 64-bit non-negative integer, got {self.seed}")
        if self.samples_per_agent < 1:
            raise ValueError("samples_per_agent must be >= 1")

    def planner_config(self) -> PlannerConfig:
        """Planner assembled from the shared sections plus planner-local knobs."""
        from dataclasses import replace

        return replace(
            self.planner,
            samples_per_agent=self.samples_per_agent,
            kernel=self.gp,
            collision=self.collision,
            solver=self.solver,
        )

    def scenario_config(self) -> ScenarioConfig:
        from dataclasses import replace

        return replace(self.scenario, sfm=self.sfm)


_SECTION_TYPES = {
    "gp": KernelParams,
    "collision": CollisionKernel,
    "solver": SolverConfig,
    "planner": PlannerConfig,
    "sfm": SfmParams,
    "scenario": ScenarioConfig,
    "replay": ReplayConfig,
    "thresholds": Thresholds,
    "evolve1d": Evolve1dConfig,
}
_SCALAR_KEYS = ("seed", "samples_per_agent", "out")
# planner-local fields; the rest of PlannerConfig comes from shared sections
_PLANNER_KEYS = (
    "horizon_steps",
    "dt",
    "robot_speed",
    "max_speed",
    "history_window",
    "obs_noise_var",
    "current_obs_noise_var",
    "goal_noise_var",
    "ped_waypoint_noise_var",
)
# composite fields fed from other sections, not settable directly
_EXCLUDED_FIELDS = {
    "planner": {"samples_per_agent", "kernel", "collision", "solver"},
    "scenario": {"sfm"},
    "solver": {"agent_order"},
}


def _build_section(name: str, cls, data: dict):
    from dataclasses import fields as dc_fields

    allowed = {f.name for f in dc_fields(cls)} - _EXCLUDED_FIELDS.get(name, set())
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in section '{name}': {sorted(unknown)}")
    coerced = {}
    for key, value in data.items():
        if isinstance(value, list):
            value = tuple(value)
        coerced[key] = value
    try:
        return cls(**coerced)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid section '{name}': {exc}") from None


def load_config(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Build an ExperimentConfig from an optional YAML file plus overrides.

    ``overrides`` maps top-level scalar keys (seed, samples_per_agent, out)
    or dotted section keys (e.g. ``scenario.n_pedestrians``) to values.
    """
    data: dict = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            loaded = yaml.safe_load(path.read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from None
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ConfigError(f"{path}: top level must be a mapping")
        data = loaded

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if "." in key:
            section, sub = key.split(".", 1)
            data.setdefault(section, {})[sub] = value
        else:
            data[key] = value

    unknown = set(data) - set(_SECTION_TYPES) - set(_SCALAR_KEYS)
    if unknown:
        raise ConfigError(f"unknown top-level config keys: {sorted(unknown)}")

    kwargs = {}
    for key in _SCALAR_KEYS:
        if key in data:
            kwargs[key] = data[key]
    for name, cls in _SECTION_TYPES.items():
        section = data.get(name, {})
        if not isinstance(section, dict):
            raise ConfigError(f"section '{name}' must be a mapping")
        kwargs[name] = _build_section(name, cls, section)
    try:
        return ExperimentConfig(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def default_config_dict() -> dict:
    """Plain-dict rendering of every default, for print-config."""
    from dataclasses import fields as dc_fields

    cfg = ExperimentConfig()
    out: dict = {k: getattr(cfg, k) for k in _SCALAR_KEYS}
    for name, cls in _SECTION_TYPES.items():
        section = getattr(cfg, name)
        fields = {}
        for f in dc_fields(cls):
            if f.name in _EXCLUDED_FIELDS.get(name, set()):
                continue
            value = getattr(section, f.name)
            if isinstance(value, tuple):
                value = list(value)
            fields[f.name] = value
        out[name] = fields
    return out


def dump_default_config() -> str:
    return yaml.safe_dump(default_config_dict(), sort_keys=False)
