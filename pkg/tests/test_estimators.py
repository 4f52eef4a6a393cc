"""End-to-end estimator contracts: formulas, determinism, release modes."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dprobust.datagen import sample_gaussian
from dprobust.estimators import (
    Method,
    WinsorizeConfig,
    dp_mean,
    dp_robust_mean,
    dp_winsorized_mean,
    winsorized_mean,
)
from dprobust.filtering import SampleSizeWarning
from dprobust.privacy import PrivacyParams, PrivacyRegimeWarning, noise_scale
from dprobust.sensitivity import RobustConfig, robust_error_bound, single_point_bound

# Frozen oracle values (test_sensitivity carries the 50-digit oracle).
VAR_ROBUST_G01 = 303.0075219908986
VAR_PLAIN_N100 = 8.768549102104222

CFG = RobustConfig(gamma=0.1, tau=0.05, c_thresh=1.0)


def clean_data(n=400, d=6, seed=0):
    return sample_gaussian(n, d, 0.0, seed=seed)


@pytest.fixture(autouse=True)
def _quiet_sample_size_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SampleSizeWarning)
        yield


class TestDpRobustMean:
    def test_noise_variance_frozen(self):
        report = dp_robust_mean(clean_data(), CFG, 1.0, seed=1)
        assert report.noise_variance == pytest.approx(VAR_ROBUST_G01, rel=1e-12)
        assert report.bound_used == pytest.approx(robust_error_bound(0.1, 1.0), rel=1e-15)
        assert report.sensitivity_used == 2.0 * report.bound_used

    def test_epsilon_to_infinity_recovers_robust_mean(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrivacyRegimeWarning)
            report = dp_robust_mean(clean_data(), CFG, 1e9, seed=2, diagnostic=True)
        assert np.max(np.abs(report.private_mean - report.robust_mean)) < 1e-6

    def test_deterministic(self):
        a = dp_robust_mean(clean_data(), CFG, 1.0, seed=5)
        b = dp_robust_mean(clean_data(), CFG, 1.0, seed=5)
        assert np.array_equal(a.private_mean, b.private_mean)

    def test_release_mode_hides_diagnostics(self):
        report = dp_robust_mean(clean_data(), CFG, 1.0, seed=3)
        assert report.robust_mean is None
        assert report.filter_diag is None
        assert report.method is Method.DP_ROBUST

    def test_diagnostic_mode(self):
        report = dp_robust_mean(clean_data(), CFG, 1.0, seed=3, diagnostic=True)
        assert report.robust_mean is not None
        assert report.filter_diag is not None

    def test_variance_matches_mechanism(self):
        report = dp_robust_mean(clean_data(), CFG, 1.0, seed=4)
        spec = noise_scale(report.sensitivity_used, PrivacyParams(1.0, CFG.tau))
        assert report.noise_variance == pytest.approx(spec.variance, rel=1e-12)

    def test_noise_variance_dimension_free(self):
        reports = [
            dp_robust_mean(clean_data(d=d, seed=d), CFG, 1.0, seed=9) for d in (3, 12, 48)
        ]
        assert len({r.noise_variance for r in reports}) == 1


class TestDpMean:
    def test_noise_variance_frozen(self):
        report = dp_mean(clean_data(n=100, d=4, seed=6), 0.05, 1.0, 1.0, seed=6)
        assert report.noise_variance == pytest.approx(VAR_PLAIN_N100, rel=1e-12)
        assert report.bound_used == pytest.approx(single_point_bound(100, 1.0), rel=1e-15)
        assert report.method is Method.DP_PLAIN

    def test_bound_shrinks_with_n(self):
        small = dp_mean(clean_data(n=100, d=3, seed=7), 0.05, 1.0, 1.0, seed=7)
        large = dp_mean(clean_data(n=10_000, d=3, seed=8), 0.05, 1.0, 1.0, seed=8)
        assert large.bound_used < small.bound_used

    def test_matches_robust_at_gamma_one_over_n(self):
        n = 500
        data = clean_data(n=n, d=4, seed=9)
        plain = dp_mean(data, 0.05, 1.0, 1.0, seed=10)
        robust = dp_robust_mean(
            data, RobustConfig(gamma=1.0 / n, tau=0.05, c_thresh=1.0), 1.0, seed=10
        )
        assert plain.bound_used == pytest.approx(robust.bound_used, abs=1e-12)
        assert plain.noise_variance == pytest.approx(robust.noise_variance, abs=1e-12)

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            dp_mean(clean_data(n=2, d=2, seed=1), 0.05, 1.0, 1.0, seed=0)

    def test_clean_input_terminates_quickly(self):
        report = dp_mean(clean_data(n=2000, d=10, seed=11), 0.05, 60.0, 1.0, seed=11, diagnostic=True)
        assert report.filter_diag.iterations <= 2

    def test_immediate_certificate_rate_with_calibrated_c(self):
        from dprobust.filtering import Termination
        from dprobust.harness import calibrate_c

        n, d = 2000, 20
        c = calibrate_c(n, d, 1.0 / n, quantile=0.95, trials=50, seed=60)
        immediate = 0
        for seed in range(100):
            report = dp_mean(
                clean_data(n=n, d=d, seed=6000 + seed), 0.05, c, 1.0, seed=seed, diagnostic=True
            )
            diag = report.filter_diag
            immediate += (
                diag.terminated_by is Termination.CERTIFICATE and diag.iterations == 0
            )
        assert immediate >= 95


class TestDpWinsorizedMean:
    def test_tiny_alpha_recovers_empirical_mean(self):
        data = clean_data(n=200, d=3, seed=12)
        mean = winsorized_mean(data, WinsorizeConfig(alpha=1e-9, range_bound=50.0))
        assert np.max(np.abs(mean - data.mean(axis=0))) < 1e-6

    def test_clamping_example(self):
        data = np.array([[-100.0], [0.0], [100.0]])
        report = dp_winsorized_mean(
            data,
            WinsorizeConfig(alpha=0.05, range_bound=1.0),
            PrivacyParams(1.0, 0.05),
            seed=13,
            diagnostic=True,
        )
        assert report.robust_mean[0] == pytest.approx(0.0, abs=1e-12)

    def test_variance_proportional_to_dimension(self):
        params = PrivacyParams(1.0, 0.05)
        wcfg = WinsorizeConfig(alpha=0.05, range_bound=10.0)
        v100 = dp_winsorized_mean(clean_data(n=300, d=100, seed=14), wcfg, params, seed=1).noise_variance
        v400 = dp_winsorized_mean(clean_data(n=300, d=400, seed=15), wcfg, params, seed=1).noise_variance
        assert v400 == pytest.approx(4.0 * v100, rel=1e-12)

    def test_sensitivity_formula(self):
        n, d, r = 250, 9, 10.0
        report = dp_winsorized_mean(
            clean_data(n=n, d=d, seed=16),
            WinsorizeConfig(alpha=0.05, range_bound=r),
            PrivacyParams(1.0, 0.05),
            seed=2,
        )
        assert report.sensitivity_used == pytest.approx(2.0 * r * math.sqrt(d) / n, rel=1e-15)
        assert report.method is Method.DP_WINSORIZED
        assert report.filter_diag is None

    @given(st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=20)
    def test_pre_noise_mean_within_range(self, seed):
        rng = np.random.default_rng(seed)
        data = rng.normal(scale=30.0, size=(50, 3))
        r = 5.0
        mean = winsorized_mean(data, WinsorizeConfig(alpha=0.1, range_bound=r))
        assert np.all(mean >= -r) and np.all(mean <= r)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            WinsorizeConfig(alpha=0.0, range_bound=1.0)
        with pytest.raises(ValueError):
            WinsorizeConfig(alpha=0.6, range_bound=1.0)
        with pytest.raises(ValueError):
            WinsorizeConfig(alpha=0.05, range_bound=-1.0)


class TestCrossMethod:
    def test_winsorized_pays_dimension_robust_does_not(self):
        params = PrivacyParams(1.0, 0.05)
        wcfg = WinsorizeConfig(alpha=0.05, range_bound=10.0)
        ratios = []
        robust_vars = []
        for d in (10, 40):
            data = clean_data(n=300, d=d, seed=40 + d)
            w = dp_winsorized_mean(data, wcfg, params, seed=3)
            r = dp_robust_mean(data, CFG, 1.0, seed=3)
            ratios.append(w.noise_variance)
            robust_vars.append(r.noise_variance)
        assert ratios[1] == pytest.approx(4.0 * ratios[0], rel=1e-12)
        assert robust_vars[0] == robust_vars[1]
