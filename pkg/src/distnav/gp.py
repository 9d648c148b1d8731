"""Gaussian-process trajectory preferences.

Each agent's preference over future trajectories is the posterior of a GP
fitted to its observed positions (per axis, squared-exponential kernel,
independent x/y). The navigation goal and any waypoints enter as artificial
observations so the posterior mean passes through them. Sampling the GP
yields the weighted-sample representation the solver operates on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, NamedTuple, Sequence

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular

from .errors import GridMismatchError, NumericalError
from .grids import TimeGrid, Trajectory, require_same_grid
from .samples import SampleSet

__all__ = [
    "Observation",
    "KernelParams",
    "PreferenceGP",
    "DensityMoments",
    "augment_with_goal",
    "fit_preference",
    "sample_trajectories",
    "log_density",
    "moments_1d",
]

_LOG_2PI = math.log(2.0 * math.pi)
# One initial jitter attempt plus this many x10 escalations before giving up.
_MAX_JITTER_ESCALATIONS = 3


@dataclass(frozen=True)
class Observation:
    """A (possibly noisy) position measurement at time ``t``."""

    t: float
    pos: tuple
    noise_var: float = 0.0

    def __post_init__(self):
        pos = tuple(float(c) for c in np.atleast_1d(self.pos))
        if len(pos) not in (1, 2):
            raise ValueError(f"pos must be 1D or 2D, got {len(pos)} components")
        object.__setattr__(self, "pos", pos)
        if not math.isfinite(self.t):
            raise ValueError("observation time must be finite")
        if self.noise_var < 0:
            raise ValueError("noise_var must be >= 0")


@dataclass(frozen=True)
class KernelParams:
    """Squared-exponential kernel hyperparameters (time in s, variance in m^2)."""

    length_scale: float = 4.0
    signal_var: float = 4.0
    jitter: float = 1e-8

    def __post_init__(self):
        for name in ("length_scale", "signal_var", "jitter"):
            if not (getattr(self, name) > 0):
                raise ValueError(f"{name} must be strictly positive")


@dataclass
class PreferenceGP:
    """GP posterior over the grid: per-axis mean, one shared T x T covariance.

    The same observation times and noises condition both axes, so the
    posterior covariance is axis-independent; only the means differ.
    """

    grid: TimeGrid
    mean: np.ndarray = field(repr=False)  # (steps, dim)
    cov: np.ndarray = field(repr=False)  # (steps, steps)
    jitter: float = 0.0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        if mean.ndim == 1:
            mean = mean[:, None]
        if mean.shape[0] != self.grid.steps or mean.shape[1] not in (1, 2):
            raise ValueError(f"mean must be ({self.grid.steps}, 1|2), got {mean.shape}")
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (self.grid.steps, self.grid.steps):
            raise ValueError(f"cov must be square of size {self.grid.steps}")
        scale = max(np.abs(cov).max(), 1.0)
        if np.abs(cov - cov.T).max() > 1e-9 * scale:
            raise ValueError("cov is not symmetric within 1e-9 relative")
        cov = 0.5 * (cov + cov.T)
        trace = np.trace(cov)
        if np.linalg.eigvalsh(cov).min() < -1e-9 * max(trace, 1.0):
            raise ValueError("cov is not positive semi-definite within tolerance")
        self.mean = mean
        self.cov = cov

    @property
    def dim(self) -> int:
        return self.mean.shape[1]

    def mean_trajectory(self) -> Trajectory:
        return Trajectory(self.grid, self.mean)


class DensityMoments(NamedTuple):
    mean: float
    variance: float
    skew: float
    excess_kurtosis: float
    modes: tuple


def _se_kernel(ta: np.ndarray, tb: np.ndarray, kp: KernelParams) -> np.ndarray:
    d = ta[:, None] - tb[None, :]
    return kp.signal_var * np.exp(-0.5 * (d / kp.length_scale) ** 2)


def _cholesky_psd(mat: np.ndarray, base_jitter: float) -> np.ndarray:
    """Lower Cholesky factor with x10 jitter escalation; exact zero matrix -> 0."""
    if not mat.any():
        return np.zeros_like(mat)
    n = mat.shape[0]
    eye = np.eye(n)
    if base_jitter <= 0:
        base_jitter = 1e-12 * max(np.trace(mat) / n, 1.0)
    jit = 0.0
    for _ in range(_MAX_JITTER_ESCALATIONS + 2):
        try:
            return cholesky(mat + jit * eye, lower=True)
        except np.linalg.LinAlgError:
            jit = base_jitter if jit == 0.0 else 10.0 * jit
    cond = float(np.linalg.cond(mat + jit * eye))
    raise NumericalError(
        f"Cholesky failed after jitter escalation to {jit:g} (cond ~ {cond:.3g})"
    )


def augment_with_goal(
    obs: Sequence[Observation],
    goal,
    goal_time: float,
    waypoints: Iterable[tuple] = (),
    artificial_noise_var: float = 0.01,
) -> list[Observation]:
    """Append the goal (and waypoints) as artificial observations, sorted by time.

    ``goal_time`` must lie strictly after the latest real observation.
    """
    obs = list(obs)
    if obs:
        last = max(o.t for o in obs)
        if goal_time <= last:
            raise ValueError(
                f"goal_time {goal_time} must be after the last observation at {last}"
            )
    extra = [Observation(goal_time, tuple(np.atleast_1d(goal)), artificial_noise_var)]
    for t, pos in waypoints:
        extra.append(Observation(float(t), tuple(np.atleast_1d(pos)), artificial_noise_var))
    return sorted(obs + extra, key=lambda o: o.t)


def fit_preference(
    obs: Sequence[Observation], grid: TimeGrid, kp: KernelParams
) -> PreferenceGP:
    """GP posterior over the grid times, per axis, from the given observations."""
    if not obs:
        raise ValueError("at least one observation is required")
    t_obs = np.array([o.t for o in obs], dtype=float)
    if not np.all(np.isfinite(t_obs)):
        raise ValueError("observation times must be finite")
    dims = {len(o.pos) for o in obs}
    if len(dims) != 1:
        raise ValueError("observations mix 1D and 2D positions")
    dim = dims.pop()
    y = np.array([o.pos for o in obs], dtype=float)  # (n, dim)
    noise = np.array([o.noise_var for o in obs], dtype=float)

    gram = _se_kernel(t_obs, t_obs, kp) + np.diag(noise)
    n = len(obs)
    jit = kp.jitter
    for attempt in range(_MAX_JITTER_ESCALATIONS + 1):
        try:
            low = cholesky(gram + jit * np.eye(n), lower=True)
            break
        except np.linalg.LinAlgError:
            jit *= 10.0
    else:
        cond = float(np.linalg.cond(gram + jit * np.eye(n)))
        raise NumericalError(
            f"singular Gram matrix after jitter escalation to {jit:g} (cond ~ {cond:.3g})"
        )

    t_grid = grid.times()
    k_star = _se_kernel(t_obs, t_grid, kp)  # (n, steps)
    alpha = cho_solve((low, True), y)  # (n, dim)
    mean = k_star.T @ alpha  # (steps, dim)
    v = solve_triangular(low, k_star, lower=True)  # (n, steps)
    cov = _se_kernel(t_grid, t_grid, kp) - v.T @ v
    cov = 0.5 * (cov + cov.T) + kp.jitter * np.eye(grid.steps)
    return PreferenceGP(grid, mean, cov, jitter=kp.jitter)


def sample_trajectories(
    gp: PreferenceGP, m: int, seed, agent: Hashable = None
) -> SampleSet:
    """Draw m trajectories from the GP; all weights start at 1.

    Deterministic for a fixed seed: same seed, bit-identical samples.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    low = _cholesky_psd(gp.cov, gp.jitter)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((m, gp.grid.steps, gp.dim))
    traj = gp.mean[None, :, :] + np.einsum("ts,msd->mtd", low, z)
    return SampleSet(agent, gp.grid, traj, np.ones(m))


def log_density(gp: PreferenceGP, f: Trajectory) -> float:
    """Log-density of a trajectory under the GP (axes independent, shared cov)."""
    require_same_grid(gp.grid, f.grid, "trajectory and GP")
    if f.dim != gp.dim:
        raise GridMismatchError(f"trajectory dim {f.dim} != GP dim {gp.dim}")
    steps = gp.grid.steps
    cov = gp.cov + gp.jitter * np.eye(steps)
    low = _cholesky_psd(cov, gp.jitter)
    if not low.any():
        raise NumericalError("degenerate (zero) covariance has no density")
    resid = f.states - gp.mean  # (steps, dim)
    z = solve_triangular(low, resid, lower=True)
    log_det_half = float(np.sum(np.log(np.diag(low))))
    total = 0.0
    for axis in range(gp.dim):
        total += -0.5 * float(z[:, axis] @ z[:, axis]) - log_det_half - 0.5 * steps * _LOG_2PI
    return total


def log_densities(gp: PreferenceGP, trajectories: np.ndarray) -> np.ndarray:
    """Vectorized :func:`log_density` for a (m, steps, dim) trajectory batch."""
    traj = np.asarray(trajectories, dtype=float)
    if traj.ndim == 2:
        traj = traj[:, :, None]
    m, steps, dim = traj.shape
    if steps != gp.grid.steps or dim != gp.dim:
        raise GridMismatchError(
            f"batch shape {traj.shape} incompatible with GP ({gp.grid.steps}, {gp.dim})"
        )
    cov = gp.cov + gp.jitter * np.eye(steps)
    low = _cholesky_psd(cov, gp.jitter)
    if not low.any():
        raise NumericalError("degenerate (zero) covariance has no density")
    resid = (traj - gp.mean[None]).transpose(1, 0, 2).reshape(steps, m * dim)
    z = solve_triangular(low, resid, lower=True).reshape(steps, m, dim)
    quad = np.einsum("tmd,tmd->m", z, z)
    log_det_half = float(np.sum(np.log(np.diag(low))))
    return -0.5 * quad - dim * (log_det_half + 0.5 * steps * _LOG_2PI)


def moments_1d(
    xs: np.ndarray, density: np.ndarray, min_mode_height: float = 0.0
) -> DensityMoments:
    """Central moments of a grid-sampled 1D density, plus its local maxima.

    The density must integrate to 1 within 1e-6 under the trapezoid rule.
    ``min_mode_height`` drops local maxima below that fraction of the peak.
    """
    xs = np.asarray(xs, dtype=float)
    ps = np.asarray(density, dtype=float)
    if xs.shape != ps.shape or xs.ndim != 1:
        raise ValueError("xs and density must be 1D arrays of equal length")
    if np.any(ps < 0):
        raise ValueError("density must be non-negative")
    total = np.trapezoid(ps, xs)
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"density integrates to {total}, not 1 within 1e-6")

    mean = np.trapezoid(xs * ps, xs)
    var = np.trapezoid((xs - mean) ** 2 * ps, xs)
    skew = np.trapezoid((xs - mean) ** 3 * ps, xs) / var**1.5
    kurt = np.trapezoid((xs - mean) ** 4 * ps, xs) / var**2 - 3.0

    floor = min_mode_height * ps.max()
    interior = (ps[1:-1] > ps[:-2]) & (ps[1:-1] > ps[2:]) & (ps[1:-1] >= floor)
    modes = tuple(float(x) for x in xs[1:-1][interior])
    return DensityMoments(float(mean), float(var), float(skew), float(kurt), modes)
