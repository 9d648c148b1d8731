"""Shared builders for solver and oracle tests."""

import numpy as np

from distnav.collision import CollisionKernel
from distnav.grids import TimeGrid, Trajectory
from distnav.oracle import GridDensity
from distnav.samples import SampleSet

GRID_1D = TimeGrid(0.0, 1.0, 1)


def gaussian_sets_1d(means, sigma, m, seed):
    """One SampleSet per mean: m scalar draws from N(mean, sigma^2), weights 1."""
    sets = []
    for k, mu in enumerate(means):
        rng = np.random.default_rng(np.random.SeedSequence((seed, k)))
        xs = mu + sigma * rng.standard_normal(m)
        sets.append(SampleSet(k, GRID_1D, xs[:, None, None], np.ones(m)))
    return sets


def gaussian_densities_1d(means, sigma, n=2001, span=8.0):
    """Grid densities matching gaussian_sets_1d, on a shared mu +- span*sigma grid."""
    lo = min(means) - span * sigma
    hi = max(means) + span * sigma
    xs = np.linspace(lo, hi, n)
    return [GridDensity.gaussian(xs, mu, sigma) for mu in means]


def random_instance(rng):
    """A random discrete problem: 2-5 agents, 5-50 samples, Gaussian clouds."""
    n_agents = int(rng.integers(2, 6))
    steps = int(rng.integers(1, 8))
    grid = TimeGrid(0.0, 0.4, steps)
    kernel = CollisionKernel(
        weight=float(rng.uniform(0.5, 20.0)), sigma=float(rng.uniform(0.1, 1.0))
    )
    sets = []
    for k in range(n_agents):
        m = int(rng.integers(5, 51))
        center = rng.uniform(-2, 2, size=2)
        states = center + rng.normal(scale=rng.uniform(0.2, 1.5), size=(m, steps, 2))
        sets.append(SampleSet(k, grid, states, np.ones(m)))
    return sets, kernel


def straight_line_trajectory(grid: TimeGrid, start, end) -> Trajectory:
    frac = np.linspace(0.0, 1.0, grid.steps)[:, None]
    states = np.asarray(start, dtype=float) + frac * (
        np.asarray(end, dtype=float) - np.asarray(start, dtype=float)
    )
    return Trajectory(grid, states)
