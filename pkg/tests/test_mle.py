import math

import numpy as np
import pytest

from coverdim.datagen import CorruptionSpec, corrupt, cube, hypersphere
from coverdim.linalg import PointSet
from coverdim.mle import DegenerateNeighborError, mle_global, mle_local

from conftest import random_rotation


class TestMleLocal:
    def test_two_neighbor_hand_value(self):
        assert abs(mle_local([1.0, 2.0], 2) - 1.0 / math.log(2.0)) < 1e-12

    def test_linear_distances_hand_value(self):
        # T_j = c*j with k = 5: the estimate is the inverse of the mean of
        # log(5/j) over j = 1..4, about 1.2271, and c cancels.
        expected = 1.0 / (sum(math.log(5.0 / j) for j in (1, 2, 3, 4)) / 4.0)
        assert abs(expected - 1.2271078) < 1e-6
        for c in (1.0, 0.37, 250.0):
            t = [c * j for j in (1, 2, 3, 4, 5)]
            assert abs(mle_local(t, 5) - expected) < 1e-12

    def test_equidistant_neighbors_diverge(self):
        assert mle_local([1.0, 1.0], 2) == math.inf

    def test_zero_distance_degenerate(self):
        with pytest.raises(DegenerateNeighborError):
            mle_local([0.0, 1.0], 2)

    def test_k_below_two(self):
        with pytest.raises(ValueError, match="k must be"):
            mle_local([1.0], 1)

    def test_too_few_distances(self):
        with pytest.raises(ValueError, match="at least"):
            mle_local([1.0, 2.0], 3)

    def test_unsorted_rejected(self):
        with pytest.raises(ValueError, match="sorted"):
            mle_local([2.0, 1.0], 2)


class TestMleGlobal:
    def test_sphere_surface(self):
        est = mle_global(hypersphere(2000, 2, seed=7), 20)
        assert 1.7 <= est.global_value <= 2.3
        assert est.degenerate_count == 0

    def test_line_segment(self):
        pts = corrupt(cube(1000, 1, seed=7), CorruptionSpec(target_dim=5, seed=8))
        est = mle_global(pts, 10)
        assert 0.9 <= est.global_value <= 1.1

    def test_identical_points_error(self):
        pts = PointSet(np.ones((5, 3)))
        with pytest.raises(DegenerateNeighborError):
            mle_global(pts, 2)

    def test_n_not_larger_than_k(self, rng):
        pts = PointSet(rng.standard_normal((5, 2)))
        with pytest.raises(ValueError, match="more than"):
            mle_global(pts, 5)

    def test_duplicate_pair_flagged_not_fatal(self, rng):
        coords = rng.standard_normal((30, 3))
        coords[11] = coords[4]  # one duplicate pair
        est = mle_global(PointSet(coords), 5)
        assert est.degenerate_count == 2
        assert np.isnan(est.local_values[4]) and np.isnan(est.local_values[11])
        assert math.isfinite(est.global_value)

    def test_scale_invariance_exact_for_dyadic_factors(self, rng):
        pts = PointSet(rng.standard_normal((120, 4)))
        base = mle_global(pts, 8).global_value
        for c in (2.0, 0.25, 1024.0):
            scaled = mle_global(PointSet(pts.points * c), 8).global_value
            assert scaled == base  # powers of two scale distances exactly

    def test_rigid_motion_invariance(self, rng):
        pts = PointSet(rng.standard_normal((150, 4)))
        rot = random_rotation(4, rng)
        moved = PointSet(pts.points @ rot.T + rng.standard_normal(4))
        a = mle_global(pts, 10).global_value
        b = mle_global(moved, 10).global_value
        assert abs(a - b) < 1e-9 * a

    def test_inverse_averaging_identity(self, rng):
        pts = PointSet(rng.standard_normal((60, 3)))
        est = mle_global(pts, 6)
        inverses = []
        for value in est.local_values:
            if math.isnan(value):
                continue
            inverses.append(0.0 if math.isinf(value) else 1.0 / value)
        assert 1.0 / est.global_value == float(np.mean(inverses))

    def test_direct_averaging_diagnostic(self, rng):
        pts = PointSet(rng.standard_normal((60, 3)))
        est = mle_global(pts, 6, direct=True)
        finite = est.local_values[np.isfinite(est.local_values)]
        assert est.method == "direct"
        assert est.global_value == float(finite.mean())
