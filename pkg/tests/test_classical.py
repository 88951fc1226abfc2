"""Tests for the GPD log-likelihood, maximum likelihood and PWM estimators."""

import math

import numpy as np
import pytest

from src.classical.likelihood import gpd_loglik, gpd_loglik_grad, gpd_mle, mle_covariance
from src.classical.pwm import pwm_covariance, pwm_fit, pwm_from_moments, sample_pwm
from src.classical.result import FitResult, normal_quantile, positive_sample, wald_interval
from src.distributions.family import GPD, sample
from src.errors import EstimatorUndefinedError, InvalidSampleError, ParameterDomainError


@pytest.fixture(scope="module")
def heavy_sample():
    """GPD(-1/3, 4/3) draws, n = 5000."""
    return sample(GPD(-1.0 / 3.0, 4.0 / 3.0), 5000, np.random.default_rng(2024))


@pytest.fixture(scope="module")
def heavy_mle(heavy_sample):
    return gpd_mle(heavy_sample)


class TestLogLikelihood:
    def test_exponential_branch(self):
        assert gpd_loglik(0.0, 1.0, [1.0, 2.0]) == pytest.approx(-3.0)

    def test_uniform_branch(self):
        x = [0.2, 0.5, 1.5]
        assert gpd_loglik(1.0, 1.5, x) == pytest.approx(-3 * math.log(1.5))

    def test_continuity_at_zero(self):
        x = [0.3, 1.1, 2.5]
        assert gpd_loglik(1e-10, 2.0, x) == pytest.approx(gpd_loglik(0.0, 2.0, x), abs=1e-6)

    def test_outside_support(self):
        assert gpd_loglik(0.5, 1.0, [0.5, 3.0]) == -math.inf
        assert gpd_loglik(0.5, 1.0, [0.5, 2.0]) == -math.inf

    @pytest.mark.parametrize("kappa", [0.5, 2.0, 4.0])
    def test_upper_endpoint_excluded(self, kappa):
        sigma = 2.0
        assert gpd_loglik(kappa, sigma, [sigma / kappa, 0.5]) == -math.inf

    def test_uniform_endpoint_finite(self):
        assert gpd_loglik(1.0, 2.0, [2.0, 0.5]) == pytest.approx(-2 * math.log(2.0))

    def test_bad_scale(self):
        with pytest.raises(ParameterDomainError):
            gpd_loglik(0.1, 0.0, [1.0])

    def test_empty_sample(self):
        with pytest.raises(InvalidSampleError):
            gpd_loglik(0.1, 1.0, [])

    @pytest.mark.parametrize("kappa", [-0.4, 0.0, 0.3])
    def test_gradient_matches_finite_difference(self, kappa, heavy_sample):
        x = heavy_sample[:200]
        sigma, h = max(1.5, 0.5 * float(x.max())), 1e-6
        grad = gpd_loglik_grad(kappa, sigma, x)
        fd_kappa = (gpd_loglik(kappa + h, sigma, x) - gpd_loglik(kappa - h, sigma, x)) / (2 * h)
        fd_tau = (gpd_loglik(kappa, sigma * math.exp(h), x)
                  - gpd_loglik(kappa, sigma * math.exp(-h), x)) / (2 * h)
        assert grad[0] == pytest.approx(fd_kappa, rel=1e-4, abs=1e-4)
        assert grad[1] == pytest.approx(fd_tau, rel=1e-4, abs=1e-4)


class TestMle:
    def test_recovers_shape(self, heavy_mle):
        se = (1.0 + 1.0 / 3.0) / math.sqrt(5000)
        assert heavy_mle.converged
        assert abs(heavy_mle.kappa + 1.0 / 3.0) < 3 * se, f"kappa_hat={heavy_mle.kappa}"
        assert heavy_mle.method == "MLE"
        assert heavy_mle.n == 5000

    def test_interval_contains_point(self, heavy_mle):
        lo, hi = heavy_mle.ci_kappa
        assert lo < heavy_mle.kappa < hi
        lo, hi = heavy_mle.ci_sigma
        assert lo < heavy_mle.sigma < hi

    def test_standard_error_formula(self, heavy_mle):
        expected = (1.0 - heavy_mle.kappa) / math.sqrt(heavy_mle.n)
        assert heavy_mle.se_kappa == pytest.approx(expected)

    def test_maximality(self, heavy_sample, heavy_mle):
        rng = np.random.default_rng(5)
        best = gpd_loglik(heavy_mle.kappa, heavy_mle.sigma, heavy_sample)
        assert heavy_mle.objective_value == pytest.approx(best)
        for _ in range(100):
            k = heavy_mle.kappa + rng.normal(0.0, 0.02)
            s = heavy_mle.sigma * math.exp(rng.normal(0.0, 0.02))
            assert gpd_loglik(k, s, heavy_sample) <= best + 1e-9

    def test_scale_equivariance(self, heavy_sample, heavy_mle):
        scaled = gpd_mle(3.0 * heavy_sample)
        assert scaled.kappa == pytest.approx(heavy_mle.kappa, abs=1e-6)
        assert scaled.sigma == pytest.approx(3.0 * heavy_mle.sigma, rel=1e-6)

    def test_bounded_tail(self):
        x = sample(GPD(0.3, 1.0), 2000, np.random.default_rng(9))
        fit = gpd_mle(x)
        assert fit.kappa == pytest.approx(0.3, abs=0.1)
        assert fit.sigma > fit.kappa * x.max()

    def test_explicit_init(self, heavy_sample, heavy_mle):
        fit = gpd_mle(heavy_sample, init=(0.0, 1.0))
        assert fit.kappa == pytest.approx(heavy_mle.kappa, abs=1e-5)

    def test_equal_points_do_not_crash(self):
        fit = gpd_mle([1.0, 1.0])
        assert isinstance(fit, FitResult)
        assert fit.sigma > 0

    def test_too_few_points(self):
        with pytest.raises(InvalidSampleError):
            gpd_mle([1.0])

    def test_covariance_gate(self):
        for k in np.linspace(-2.0, 1.0, 31):
            cov = mle_covariance(float(k), 1.0, 100)
            assert (cov is None) == (k >= 0.5), f"kappa={k}"


class TestPwm:
    def test_population_inversion(self):
        kappa, sigma = pwm_from_moments(1.0, 0.25)
        assert kappa == pytest.approx(0.0, abs=1e-12)
        assert sigma == pytest.approx(1.0)

    def test_undefined(self):
        with pytest.raises(EstimatorUndefinedError):
            pwm_from_moments(1.0, 0.5)

    def test_moment_identity(self, heavy_sample):
        fit = pwm_fit(heavy_sample)
        mu0, mu1 = sample_pwm(heavy_sample)
        assert fit.sigma / (1.0 + fit.kappa) == pytest.approx(mu0, abs=1e-10)
        assert fit.sigma / (2.0 * (2.0 + fit.kappa)) == pytest.approx(mu1, abs=1e-10)

    def test_recovers_parameters(self):
        x = sample(GPD(-1.0 / 3.0, 4.0 / 3.0), 10_000, np.random.default_rng(77))
        fit = pwm_fit(x)
        assert abs(fit.kappa + 1.0 / 3.0) < 3 * fit.se_kappa
        assert abs(fit.sigma - 4.0 / 3.0) < 3 * fit.se_sigma
        lo, hi = fit.ci_kappa
        assert lo < fit.kappa < hi

    def test_scale_equivariance(self, heavy_sample):
        a, b = pwm_fit(heavy_sample), pwm_fit(2.5 * heavy_sample)
        assert b.kappa == pytest.approx(a.kappa, rel=1e-12, abs=1e-12)
        assert b.sigma == pytest.approx(2.5 * a.sigma, rel=1e-12)

    def test_covariance_gate(self):
        for k in np.linspace(-1.5, 1.0, 26):
            cov = pwm_covariance(float(k), 1.0, 100)
            assert (cov is None) == (not -0.5 < k < 0.5), f"kappa={k}"

    def test_shape_variance_diverges_at_lower_gate(self):
        near = pwm_covariance(-0.49, 1.0, 100)[0, 0]
        inner = pwm_covariance(-0.3, 1.0, 100)[0, 0]
        assert near > 10 * inner
        assert pwm_covariance(-0.6, 1.0, 100) is None

    def test_covariance_positive_definite(self):
        for k in (-0.45, -0.2, 0.0, 0.2, 0.45):
            assert np.all(np.linalg.eigvalsh(pwm_covariance(k, 1.0, 50)) > 0)

    def test_single_point(self):
        with pytest.raises(InvalidSampleError):
            pwm_fit([3.2])


class TestHelpers:
    def test_normal_quantile(self):
        assert normal_quantile(0.95) == pytest.approx(1.959964, abs=1e-6)

    def test_wald_interval(self):
        assert wald_interval(1.0, 0.5, 0.95) == pytest.approx((1.0 - 0.979982, 1.0 + 0.979982), abs=1e-6)

    def test_positive_sample(self):
        with pytest.raises(InvalidSampleError):
            positive_sample([1.0, 0.0])
        np.testing.assert_array_equal(positive_sample([1, 2]), [1.0, 2.0])
