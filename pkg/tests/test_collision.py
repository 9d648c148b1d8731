import math

import numpy as np
import pytest

from distnav.collision import (
    CollisionKernel,
    expected_penalty,
    joint_expected_penalty,
    pairwise_penalty,
    penalty_matrix,
)
from distnav.errors import GridMismatchError
from distnav.grids import TimeGrid, Trajectory
from distnav.samples import SampleSet

GRID = TimeGrid(0.0, 0.4, 10)
KERNEL = CollisionKernel(weight=10.0, sigma=0.35)


def traj(states):
    return Trajectory(GRID, np.asarray(states, dtype=float))


def random_traj(rng, scale=2.0):
    return traj(rng.normal(scale=scale, size=(GRID.steps, 2)))


def sample_set(agent, rng, m, center=(0.0, 0.0), spread=1.0):
    base = np.asarray(center, dtype=float)
    states = base + rng.normal(scale=spread, size=(m, GRID.steps, 2))
    return SampleSet(agent, GRID, states, np.ones(m))


class TestPairwisePenalty:
    def test_identical_trajectories_hit_peak_exactly(self):
        rng = np.random.default_rng(0)
        f = random_traj(rng)
        val = pairwise_penalty(f, f, KERNEL)
        assert val == KERNEL.weight / (2 * math.pi * KERNEL.sigma**2)

    def test_far_apart_is_negligible(self):
        a = traj(np.zeros((GRID.steps, 2)))
        b = traj(np.full((GRID.steps, 2), 10 * KERNEL.sigma))
        assert pairwise_penalty(a, b, KERNEL) < 1e-20 * KERNEL.weight / KERNEL.sigma**2

    def test_one_sigma_crossing(self):
        states_a = np.zeros((GRID.steps, 2))
        states_b = np.full((GRID.steps, 2), 100.0)
        states_b[4] = (KERNEL.sigma, 0.0)  # closest approach at exactly one sigma
        val = pairwise_penalty(traj(states_a), traj(states_b), KERNEL)
        peak = KERNEL.peak(2)
        assert val == pytest.approx(peak * math.exp(-0.5), rel=1e-12)

    def test_grid_mismatch_raises(self):
        other = Trajectory(TimeGrid(0.0, 0.5, 10), np.zeros((10, 2)))
        with pytest.raises(GridMismatchError):
            pairwise_penalty(traj(np.zeros((10, 2))), other, KERNEL)

    def test_symmetry_exact_on_random_pairs(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            a, b = random_traj(rng), random_traj(rng)
            assert pairwise_penalty(a, b, KERNEL) == pairwise_penalty(b, a, KERNEL)

    def test_bounds(self):
        rng = np.random.default_rng(1)
        peak = KERNEL.peak(2)
        for _ in range(200):
            v = pairwise_penalty(random_traj(rng), random_traj(rng), KERNEL)
            assert 0.0 <= v <= peak

    def test_weight_scaling_is_linear(self):
        rng = np.random.default_rng(2)
        a, b = random_traj(rng), random_traj(rng)
        base = pairwise_penalty(a, b, KERNEL)
        for alpha in (2.0, 0.5, 4.0):
            scaled = CollisionKernel(weight=alpha * KERNEL.weight, sigma=KERNEL.sigma)
            assert pairwise_penalty(a, b, scaled) == alpha * base


class TestPenaltyMatrix:
    def test_self_matrix_symmetric_with_peak_diagonal(self):
        rng = np.random.default_rng(3)
        a = sample_set("a", rng, 6)
        mat = penalty_matrix(a, a, KERNEL)
        assert np.array_equal(mat, mat.T)
        assert np.allclose(np.diag(mat), KERNEL.peak(2))

    def test_single_sample_matches_pairwise(self):
        rng = np.random.default_rng(4)
        a, b = sample_set("a", rng, 1), sample_set("b", rng, 1)
        mat = penalty_matrix(a, b, KERNEL)
        assert mat.shape == (1, 1)
        assert mat[0, 0] == pairwise_penalty(a.trajectory(0), b.trajectory(0), KERNEL)

    def test_transpose_identity_exact(self):
        rng = np.random.default_rng(5)
        a, b = sample_set("a", rng, 3), sample_set("b", rng, 4)
        assert np.array_equal(penalty_matrix(a, b, KERNEL), penalty_matrix(b, a, KERNEL).T)

    def test_entries_match_pairwise_penalty(self):
        rng = np.random.default_rng(6)
        a, b = sample_set("a", rng, 3), sample_set("b", rng, 2)
        mat = penalty_matrix(a, b, KERNEL)
        for y in range(3):
            for z in range(2):
                assert mat[y, z] == pairwise_penalty(a.trajectory(y), b.trajectory(z), KERNEL)


class TestExpectedPenalty:
    def test_shared_single_sample_hits_peak(self):
        states = np.zeros((1, GRID.steps, 2))
        a = SampleSet("a", GRID, states, np.ones(1))
        b = SampleSet("b", GRID, states.copy(), np.ones(1))
        assert expected_penalty(a, b, KERNEL) == KERNEL.peak(2)

    def test_far_sets_negligible(self):
        rng = np.random.default_rng(7)
        a = sample_set("a", rng, 5, center=(0.0, 0.0), spread=0.1)
        b = sample_set("b", rng, 5, center=(100.0, 0.0), spread=0.1)
        assert expected_penalty(a, b, KERNEL) < 1e-20

    def test_hand_case_quarter(self):
        # psi(a1,b1)=1, other pairs ~0, all weights 1 -> (1/4) * 1
        sigma = 0.35
        unit_peak = CollisionKernel(weight=2 * math.pi * sigma**2, sigma=sigma)
        g = TimeGrid(0.0, 0.4, 1)
        a = SampleSet("a", g, np.array([[[0.0, 0.0]], [[100.0, 0.0]]]), np.ones(2))
        b = SampleSet("b", g, np.array([[[0.0, 0.0]], [[200.0, 0.0]]]), np.ones(2))
        assert expected_penalty(a, b, unit_peak) == pytest.approx(0.25, abs=1e-12)

    def test_weight_scaling_is_linear(self):
        rng = np.random.default_rng(8)
        a, b = sample_set("a", rng, 4), sample_set("b", rng, 5)
        base = expected_penalty(a, b, KERNEL)
        doubled = CollisionKernel(weight=2 * KERNEL.weight, sigma=KERNEL.sigma)
        assert expected_penalty(a, b, doubled) == 2 * base


class TestJointExpectedPenalty:
    def test_two_sets_equal_pair_penalty(self):
        rng = np.random.default_rng(9)
        a, b = sample_set("a", rng, 4), sample_set("b", rng, 4)
        assert joint_expected_penalty([a, b], KERNEL) == expected_penalty(a, b, KERNEL)

    def test_three_far_sets_near_zero(self):
        rng = np.random.default_rng(10)
        sets = [
            sample_set(i, rng, 4, center=(100.0 * i, 0.0), spread=0.1) for i in range(3)
        ]
        assert joint_expected_penalty(sets, KERNEL) < 1e-20

    def test_single_overlapping_pair_dominates(self):
        rng = np.random.default_rng(11)
        a = sample_set("a", rng, 4, center=(0.0, 0.0), spread=0.2)
        b = sample_set("b", rng, 4, center=(0.3, 0.0), spread=0.2)
        c = sample_set("c", rng, 4, center=(500.0, 0.0), spread=0.2)
        total = joint_expected_penalty([a, b, c], KERNEL)
        assert total == pytest.approx(expected_penalty(a, b, KERNEL), abs=1e-12)

    def test_fewer_than_two_sets_raises(self):
        rng = np.random.default_rng(12)
        with pytest.raises(ValueError):
            joint_expected_penalty([sample_set("a", rng, 3)], KERNEL)

    def test_reordering_invariance(self):
        rng = np.random.default_rng(13)
        sets = [sample_set(i, rng, 3, center=(0.5 * i, 0.0)) for i in range(4)]
        ref = joint_expected_penalty(sets, KERNEL)
        for perm in ([3, 1, 0, 2], [2, 3, 1, 0], [1, 0, 3, 2]):
            val = joint_expected_penalty([sets[i] for i in perm], KERNEL)
            assert val == pytest.approx(ref, rel=1e-12)
