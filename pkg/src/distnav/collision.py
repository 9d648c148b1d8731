"""Collision penalty on trajectory pairs and its Monte Carlo expectations.

The pairwise penalty is the max over time of a Gaussian bump in the distance
between two time-aligned trajectories; expectations over sample sets are
weighted double sums. Matrices of pairwise penalties are precomputed once per
solve because sample trajectories never change, only weights do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grids import Trajectory, require_same_grid
from .samples import SampleSet

__all__ = [
    "CollisionKernel",
    "pairwise_penalty",
    "penalty_matrix",
    "expected_penalty",
    "joint_expected_penalty",
]

# Row-block size cap (in scratch floats) when materializing distance tensors.
_BLOCK_BUDGET = 8_000_000


@dataclass(frozen=True)
class CollisionKernel:
    """Gaussian closeness penalty: weight w and isotropic std sigma (m)."""

    weight: float = 10.0
    sigma: float = 0.35

    def __post_init__(self):
        if not (self.weight > 0):
            raise ValueError("weight must be > 0")
        if not (self.sigma > 0):
            raise ValueError("sigma must be > 0")

    def peak(self, dim: int = 2) -> float:
        """Penalty at zero separation: w * (2 pi sigma^2)^(-dim/2)."""
        return self.weight * (2.0 * math.pi * self.sigma**2) ** (-dim / 2.0)


def _min_sq_dist(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Min-over-time squared distance between batches (ma,T,d) and (mb,T,d)."""
    diff = a[:, None, :, :] - b[None, :, :, :]
    return np.einsum("abtd,abtd->abt", diff, diff).min(axis=2)


def _penalty_block(a: np.ndarray, b: np.ndarray, kernel: CollisionKernel) -> np.ndarray:
    """Penalty for every pair of the (ma,T,d) and (mb,T,d) trajectory batches."""
    d2 = _min_sq_dist(a, b)
    np.multiply(d2, -0.5 / kernel.sigma**2, out=d2)
    np.exp(d2, out=d2)
    d2 *= kernel.peak(a.shape[2])
    return d2


def pairwise_penalty(fa: Trajectory, fb: Trajectory, kernel: CollisionKernel) -> float:
    """Max over time steps of the Gaussian penalty between two trajectories."""
    require_same_grid(fa.grid, fb.grid, "trajectories")
    if fa.dim != fb.dim:
        raise ValueError(f"trajectory dims differ: {fa.dim} vs {fb.dim}")
    return float(_penalty_block(fa.states[None], fb.states[None], kernel)[0, 0])


def penalty_matrix(
    a: SampleSet, b: SampleSet, kernel: CollisionKernel, dtype=np.float64
) -> np.ndarray:
    """Matrix of pairwise penalties, entry (y, z) = penalty(a_y, b_z).

    Computed in row blocks to bound scratch memory; ``dtype=np.float32`` halves
    the cache footprint for very large sample sets.
    """
    require_same_grid(a.grid, b.grid, "sample sets")
    if a.dim != b.dim:
        raise ValueError(f"sample set dims differ: {a.dim} vs {b.dim}")
    ta, tb = a.trajectories, b.trajectories
    ma, mb = ta.shape[0], tb.shape[0]
    out = np.empty((ma, mb), dtype=dtype)
    block = max(1, _BLOCK_BUDGET // max(mb * a.grid.steps * a.dim, 1))
    for s in range(0, ma, block):
        e = min(s + block, ma)
        out[s:e] = _penalty_block(ta[s:e], tb, kernel)
    return out


def expected_penalty(
    a: SampleSet,
    b: SampleSet,
    kernel: CollisionKernel,
    matrix: np.ndarray | None = None,
) -> float:
    """Monte Carlo expected penalty: weighted mean of the penalty matrix."""
    if matrix is None:
        matrix = penalty_matrix(a, b, kernel)
    qa = (a.weights / a.m).astype(matrix.dtype, copy=False)
    qb = (b.weights / b.m).astype(matrix.dtype, copy=False)
    return float(qa @ (matrix @ qb))


def joint_expected_penalty(
    sets: Sequence[SampleSet],
    kernel: CollisionKernel,
    matrices: dict | None = None,
) -> float:
    """Sum of expected penalties over all unordered pairs of sample sets."""
    if len(sets) < 2:
        raise ValueError("need at least 2 sample sets")
    total = 0.0
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            mat = matrices.get((i, j)) if matrices is not None else None
            total += expected_penalty(sets[i], sets[j], kernel, matrix=mat)
    return total
