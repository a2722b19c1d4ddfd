import numpy as np
import pytest

from coverdim.linalg import PointSet, Spectrum
from coverdim.spectra import (
    IdCriteria,
    apply_criteria,
    denoise,
    estimate_noise_variance,
    id_by_ratio,
    id_by_variance_pct,
    local_id,
    locate_noise_start,
)

from conftest import random_rotation


def spec_of(values, subset_size=None):
    values = np.asarray(values, dtype=float)
    return Spectrum(values, subset_size=subset_size or values.size)


class TestIdCriteria:
    def test_defaults(self):
        crit = IdCriteria()
        assert crit.alpha == 10.0 and crit.beta == 0.8
        assert crit.noise_p == 0.95 and crit.noise_pc_cap == 10
        assert crit.filter_noise

    @pytest.mark.parametrize("kwargs", [
        dict(alpha=1.0), dict(beta=0.0), dict(beta=1.0),
        dict(noise_p=0.0), dict(noise_p=1.0), dict(noise_pc_cap=0),
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            IdCriteria(**kwargs)


class TestLocateNoiseStart:
    def test_hand_trace(self):
        # Cumulative ratios 0.833, 0.875, 0.917 stay below 0.95; 0.958 crosses.
        assert locate_noise_start([10, 0.5, 0.5, 0.5, 0.5], 0.95) == 4

    def test_all_variance_in_first_pc(self):
        assert locate_noise_start([1.0, 0.0, 0.0], 0.95) == 1

    def test_uniform_spectrum(self):
        assert locate_noise_start([1.0, 1.0, 1.0, 1.0], 0.95) == 4

    def test_boundary_equality_not_exceeded(self):
        # Prefix ratio exactly 0.75 does not cross P = 0.75.
        assert locate_noise_start([1.0, 1.0, 1.0, 1.0], 0.75) == 4

    def test_flat_spectrum_is_none(self):
        assert locate_noise_start([0.0, 0.0], 0.95) is None


class TestEstimateNoiseVariance:
    def test_hand_trace(self):
        sigma2 = estimate_noise_variance(spec_of([10, 0.5, 0.5, 0.5, 0.5]), IdCriteria())
        assert sigma2 == 0.5

    def test_noise_dominated_rank_one(self):
        # r = 1: the whole spectrum counts as noise, mean(1, 0, 0) = 1/3.
        sigma2 = estimate_noise_variance(spec_of([1.0, 0.0, 0.0]), IdCriteria())
        assert sigma2 == 1.0 / 3.0

    def test_filter_off_returns_zero(self):
        crit = IdCriteria(filter_noise=False)
        assert estimate_noise_variance(spec_of([10, 0.5, 0.5]), crit) == 0.0

    def test_flat_spectrum_returns_zero(self):
        assert estimate_noise_variance(spec_of([0.0, 0.0]), IdCriteria()) == 0.0

    def test_cap_limits_noise_slice(self):
        # Tail has 54 entries past the start; only the first 10 enter the mean.
        values = [100.0] + [0.2] * 50 + [0.1] * 50
        sigma2 = estimate_noise_variance(spec_of(values), IdCriteria())
        assert locate_noise_start(values, 0.95) == 48
        assert abs(sigma2 - (4 * 0.2 + 6 * 0.1) / 10) < 1e-12


class TestDenoise:
    def test_subtract_and_clamp(self):
        den = denoise(spec_of([10, 0.5, 0.5, 0.5, 0.5]), 0.5)
        np.testing.assert_array_equal(den.variances, [9.5, 0, 0, 0, 0])

    def test_zero_noise_identity(self):
        den = denoise(spec_of([3.0, 2.0, 1.0]), 0.0)
        np.testing.assert_array_equal(den.variances, [3, 2, 1])

    def test_uniform_shift_preserves_gaps(self):
        den = denoise(spec_of([3.0, 2.0, 1.0]), 1.0)
        np.testing.assert_array_equal(den.variances, [2, 1, 0])

    def test_rejects_negative_noise(self):
        with pytest.raises(ValueError):
            denoise(spec_of([1.0]), -0.1)

    def test_shift_equivariance_dyadic(self):
        # Adding c to every eigenvalue and to the noise variance changes
        # nothing; dyadic values keep the float arithmetic exact.
        base = np.array([4.0, 2.0, 1.0, 0.5])
        c = 2.0
        lhs = denoise(spec_of(base + c), 0.5 + c).variances
        rhs = denoise(spec_of(base), 0.5).variances
        np.testing.assert_array_equal(lhs, rhs)


class TestIdByRatio:
    def test_gap_detection(self):
        assert id_by_ratio([100, 50, 0.1, 0.05], 10.0) == 2

    def test_infinite_ratio_counts(self):
        assert id_by_ratio([9.5, 0, 0, 0, 0], 10.0) == 1

    def test_no_gap_returns_none(self):
        assert id_by_ratio([5, 4, 3], 10.0) is None

    def test_single_entry_returns_none(self):
        assert id_by_ratio([5.0], 10.0) is None

    def test_all_zero_returns_none(self):
        assert id_by_ratio([0.0, 0.0], 10.0) is None


class TestIdByVariancePct:
    def test_strict_boundary(self):
        # 8/10 equals beta and does not cross; 9/10 does.
        assert id_by_variance_pct([8.0, 1.0, 1.0], 0.8) == 2

    def test_rank_one(self):
        assert id_by_variance_pct([1.0, 0.0, 0.0], 0.8) == 1

    def test_denoised_trace(self):
        assert id_by_variance_pct([9.5, 0, 0, 0, 0], 0.8) == 1

    def test_flat_returns_zero(self):
        assert id_by_variance_pct([0.0, 0.0], 0.8) == 0

    def test_monotone_in_beta(self, rng):
        for _ in range(50):
            v = np.sort(rng.uniform(0, 1, rng.integers(1, 10)))[::-1]
            betas = np.sort(rng.uniform(0.05, 0.95, 4))
            ids = [id_by_variance_pct(v, b) for b in betas]
            assert all(a <= b for a, b in zip(ids, ids[1:]))


class TestCriteriaProperties:
    def test_scale_invariance(self, rng):
        for _ in range(50):
            v = np.sort(rng.uniform(0, 1, rng.integers(2, 10)))[::-1]
            for c in (0.5, 4.0, 3.7, 1e6):
                assert id_by_ratio(v * c, 10.0) == id_by_ratio(v, 10.0)
                assert id_by_variance_pct(v * c, 0.8) == id_by_variance_pct(v, 0.8)

    def test_rank_recovery_without_filter(self, rng):
        # Noiseless exact-rank-d subsets, filter off: both criteria hit d.
        crit = IdCriteria(filter_noise=False)
        for d in (1, 2, 3, 4):
            coords = rng.uniform(0, 1, (60, d))
            basis = random_rotation(8, rng)[:, :d]
            le = local_id(PointSet(coords @ basis.T), crit)
            assert le.ratio_id == d
            assert le.local_id == d

    def test_constructed_plateau_spectrum(self):
        # Three signal directions at 1.0 over a flat tail of 8 at 0.0625: the
        # tail carries >5% of the variance, so the noise start lands inside
        # it, the noise estimate equals the tail value exactly, and the
        # pipeline returns 3.
        values = np.array([1.0] * 3 + [0.0625] * 8)
        spectrum = spec_of(values, subset_size=11)
        crit = IdCriteria()
        assert locate_noise_start(values, crit.noise_p) == 9
        assert estimate_noise_variance(spectrum, crit) == 0.0625
        den, estimated, ratio_id, pct_id = apply_criteria(spectrum, crit)
        assert estimated == 3 and ratio_id == 3
        np.testing.assert_array_equal(den.variances[3:], np.zeros(8))


class TestLocalId:
    def test_noiseless_plane_both_criteria(self, rng):
        coords = rng.uniform(0, 1, (100, 2))
        basis = random_rotation(5, rng)[:, :2]
        le = local_id(PointSet(coords @ basis.T), IdCriteria())
        assert le.local_id == 2 and le.ratio_id == 2 and le.pct_id == 2

    def test_noisy_plane_recovers_noise_variance(self):
        # Unit-square patch in 5 dims plus white noise of variance 0.01: the
        # estimate stays 2 and the recovered noise variance is the right
        # order of magnitude.
        rng = np.random.default_rng(3)
        coords = np.zeros((100, 5))
        coords[:, :2] = rng.uniform(0, 1, (100, 2))
        noisy = coords + rng.normal(0, 0.1, coords.shape)
        le = local_id(PointSet(noisy), IdCriteria())
        assert le.local_id == 2
        assert 0.005 <= le.noise_var <= 0.02

    def test_singleton_subset(self):
        le = local_id(PointSet(np.array([[1.0, 2.0, 3.0]])), IdCriteria())
        assert le.local_id == 0
        assert le.spectrum.eigenvalues.tolist() == [0.0]

    def test_noise_dominated_flag(self):
        den, estimated, _, _ = apply_criteria(spec_of([1.0, 0.0, 0.0]), IdCriteria())
        assert den.noise_dominated
        assert estimated == 1  # 2/3 over an exactly zero tail

    def test_lpca_mode_reports_no_noise(self, rng):
        coords = rng.uniform(0, 1, (30, 3))
        le = local_id(PointSet(coords), IdCriteria(filter_noise=False))
        assert le.noise_var == 0.0
        assert le.denoised.noise_start is None
        np.testing.assert_array_equal(le.denoised.variances, le.spectrum.eigenvalues)
