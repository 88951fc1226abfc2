"""Tests for the GPD family: evaluation, inversion, sampling, transforms and the conjugate update."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from src.distributions.conjugate import GammaPosterior, ParetoGammaHyper, pareto_gamma_update
from src.distributions.family import (
    GPD, Exponential, InvPareto, LocExp, Pareto, Uniform,
    cdf, density, law, mean_excess, moments, quantile, sample, transform,
)
from src.errors import (
    DegenerateSampleError, DomainError, MomentExistenceError, ParameterDomainError,
)
from src.intrinsic.stats import SuffStats

SUPPORTS = [
    (GPD(-0.5, 1.0), 0.0, math.inf),
    (GPD(0.0, 2.0), 0.0, math.inf),
    (GPD(0.5, 2.0), 0.0, 4.0),
    (Pareto(2.5, 1.0), 1.0, math.inf),
    (InvPareto(3.0, 2.0), 0.0, 2.0),
    (LocExp(2.0, -1.0), -1.0, math.inf),
    (Exponential(0.5), 0.0, math.inf),
    (Uniform(3.0), 0.0, 3.0),
]


class TestParameters:
    def test_non_positive_scale_rejected(self):
        with pytest.raises(ParameterDomainError):
            GPD(0.1, 0.0)
        with pytest.raises(ParameterDomainError):
            Pareto(2.0, -1.0)
        with pytest.raises(ParameterDomainError):
            Exponential(0.0)

    def test_gpd_upper_support(self):
        assert GPD(0.5, 2.0).upper == 4.0
        assert GPD(-0.5, 2.0).upper == math.inf


class TestDensity:
    def test_exponential_case_at_origin(self):
        assert density(GPD(0.0, 1.0), 0.0) == pytest.approx(1.0)

    def test_uniform_case(self):
        assert density(GPD(1.0, 1.0), 0.3) == pytest.approx(1.0)

    def test_pareto_value(self):
        assert density(Pareto(2.0, 1.0), 2.0) == pytest.approx(0.25)

    def test_zero_outside_support(self):
        assert density(GPD(0.5, 1.0), 3.0) == 0.0
        assert density(Pareto(2.0, 1.0), 0.5) == 0.0
        assert density(InvPareto(2.0, 1.0), 1.5) == 0.0

    def test_vectorised_shape(self):
        out = density(GPD(-0.2, 1.0), np.array([[0.1, 0.2], [0.3, 0.4]]))
        assert out.shape == (2, 2)

    @pytest.mark.parametrize("kappa", [-0.4, 0.3, 2.0])
    def test_gpd_closed_form(self, kappa):
        sigma = 1.5
        x = np.linspace(0.05, 0.6, 12)
        expected = (1.0 / sigma) * (1.0 - kappa * x / sigma) ** (1.0 / kappa - 1.0)
        np.testing.assert_allclose(density(GPD(kappa, sigma), x), expected, rtol=1e-10)

    def test_law_support(self):
        assert law(GPD(0.5, 2.0)).support() == pytest.approx((0.0, 4.0))
        assert law(InvPareto(3.0, 2.0)).support() == pytest.approx((0.0, 2.0))
        assert law(Pareto(2.5, 1.0)).support()[0] == pytest.approx(1.0)
        assert law(LocExp(2.0, -1.0)).support()[0] == pytest.approx(-1.0)

    @pytest.mark.parametrize("dist,lo,hi", SUPPORTS)
    def test_normalisation(self, dist, lo, hi):
        total, _ = quad(lambda t: density(dist, t), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
        assert abs(total - 1.0) < 1e-8, f"{dist} integrates to {total}"


class TestCdf:
    def test_uniform_case(self):
        assert cdf(GPD(1.0, 1.0), 0.5) == pytest.approx(0.5)

    def test_inverted_pareto_upper_endpoint(self):
        assert cdf(InvPareto(2.0, 1.0), 1.0) == 1.0

    def test_heavy_tail_value(self):
        assert cdf(GPD(-0.5, 1.0), 1.0) == pytest.approx(1.0 - 1.5 ** -2, abs=1e-12)

    def test_matches_integrated_density(self):
        dist = GPD(-0.5, 1.0)
        area, _ = quad(lambda t: density(dist, t), 0.0, 1.0, epsabs=1e-13)
        assert cdf(dist, 1.0) == pytest.approx(area, abs=1e-10)

    @pytest.mark.parametrize("dist,lo,hi", SUPPORTS)
    def test_monotone_and_bounded(self, dist, lo, hi):
        span = hi if math.isfinite(hi) else lo + 50.0
        grid = np.linspace(lo - 1.0, span + 1.0, 400)
        values = cdf(dist, grid)
        assert np.all(np.diff(values) >= 0)
        assert values[0] == 0.0
        assert values.max() <= 1.0


class TestQuantile:
    def test_uniform(self):
        assert quantile(Uniform(4.0), 0.25) == pytest.approx(1.0)

    def test_unit_pareto_median(self):
        assert quantile(Pareto(1.0, 1.0), 0.5) == pytest.approx(2.0)

    def test_heavy_tail_inverts_cdf(self):
        dist = GPD(-0.4, 1.0)
        assert cdf(dist, quantile(dist, 0.99)) == pytest.approx(0.99, rel=1e-12)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_outside_unit_interval(self, p):
        with pytest.raises(DomainError):
            quantile(GPD(0.0, 1.0), p)

    @pytest.mark.parametrize("dist,lo,hi", SUPPORTS)
    def test_cdf_of_quantile(self, dist, lo, hi):
        p = np.linspace(0.001, 0.999, 99)
        np.testing.assert_allclose(cdf(dist, quantile(dist, p)), p, rtol=1e-11)

    @pytest.mark.parametrize("dist,lo,hi", SUPPORTS)
    def test_quantile_of_cdf(self, dist, lo, hi):
        x = quantile(dist, np.linspace(0.01, 0.99, 50))
        np.testing.assert_allclose(quantile(dist, cdf(dist, x)), x, rtol=1e-9)


class TestShapeContinuity:
    @pytest.mark.parametrize("eps", [1e-9, -1e-9])
    def test_near_zero_shape_matches_exponential_branch(self, eps):
        base, near = GPD(0.0, 1.5), GPD(eps, 1.5)
        x = np.linspace(0.01, 10.0, 50)
        p = np.linspace(0.01, 0.99, 50)
        np.testing.assert_allclose(density(near, x), density(base, x), atol=1e-6)
        np.testing.assert_allclose(cdf(near, x), cdf(base, x), atol=1e-6)
        np.testing.assert_allclose(quantile(near, p), quantile(base, p), atol=1e-6)


class TestSample:
    def test_deterministic_given_seed(self):
        dist = GPD(-0.3, 2.0)
        a = sample(dist, 100, np.random.default_rng(7))
        b = sample(dist, 100, np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)

    def test_gpd_ks(self):
        dist = GPD(-1.0 / 3.0, 4.0)
        draws = sample(dist, 100_000, np.random.default_rng(1))
        stat = kstest(draws, lambda t: cdf(dist, t)).statistic
        assert stat < 0.01, f"KS statistic {stat}"

    def test_pareto_respects_scale(self):
        draws = sample(Pareto(3.0, 4.0), 100_000, np.random.default_rng(2))
        assert draws.min() >= 4.0

    def test_bounded_support(self):
        draws = sample(GPD(0.5, 1.0), 10_000, np.random.default_rng(3))
        assert draws.min() >= 0.0 and draws.max() <= 2.0

    def test_bad_size(self):
        with pytest.raises(DomainError):
            sample(GPD(0.0, 1.0), 0, np.random.default_rng(0))


class TestTransform:
    def test_exponential_special_case(self):
        targets = [m.target for m in transform(GPD(0.0, 2.0))]
        assert targets == [Exponential(0.5)]

    def test_unit_inverted_pareto_is_uniform(self):
        maps = transform(InvPareto(1.0, 4.0), Uniform)
        assert maps[0].target == Uniform(4.0)

    def test_pareto_threshold_excess(self):
        m = transform(Pareto(2.33, 0.0503), GPD)[0]
        assert m.variable_change == "z = y - beta"
        assert m.target.kappa == pytest.approx(-0.429, abs=1e-3)
        assert m.target.sigma == pytest.approx(0.0216, abs=1e-4)

    def test_inverted_pareto_log_location(self):
        m = transform(InvPareto(2.0, 3.0), LocExp)[0]
        assert m.target == LocExp(2.0, -math.log(3.0))

    def test_no_mapping_for_target(self):
        with pytest.raises(DomainError):
            transform(GPD(0.5, 1.0), Pareto)
        with pytest.raises(DomainError):
            transform(GPD(-0.5, 1.0), InvPareto)

    def test_unsupported_source(self):
        with pytest.raises(DomainError):
            transform(Exponential(1.0))

    @pytest.mark.parametrize("dist", [
        GPD(0.5, 2.0), GPD(-0.25, 1.0), GPD(0.0, 2.0), GPD(1.0, 3.0),
        Pareto(2.33, 0.0503), InvPareto(2.0, 3.0), InvPareto(1.0, 4.0),
    ])
    def test_mappings_push_samples_onto_target(self, dist):
        draws = sample(dist, 100_000, np.random.default_rng(11))
        for m in transform(dist):
            stat = kstest(m.forward(draws), lambda t: cdf(m.target, t)).statistic
            assert stat < 0.01, f"{dist} -> {m.target} via {m.variable_change}: KS {stat}"


class TestMeanExcess:
    def test_exponential_memoryless(self):
        assert mean_excess(GPD(0.0, 2.0), 5.0) == pytest.approx(2.0)

    def test_pareto(self):
        assert mean_excess(Pareto(2.0, 1.0), 3.0) == pytest.approx(3.0)

    def test_no_mean(self):
        with pytest.raises(MomentExistenceError):
            mean_excess(GPD(-1.0, 1.0), 1.0)
        with pytest.raises(MomentExistenceError):
            mean_excess(Pareto(1.0, 1.0), 2.0)

    def test_gpd_affine_in_threshold(self):
        dist = GPD(-0.3, 2.0)
        values = [mean_excess(dist, t) for t in (0.0, 1.0, 2.0)]
        slope = 0.3 / 0.7
        assert values[1] - values[0] == pytest.approx(slope)
        assert values[2] - values[1] == pytest.approx(slope)

    def test_inverted_pareto_matches_quadrature(self):
        dist, t = InvPareto(2.0, 3.0), 1.0
        tail_area, _ = quad(lambda y: 1.0 - cdf(dist, y), t, 3.0)
        assert mean_excess(dist, t) == pytest.approx(tail_area / (1.0 - cdf(dist, t)), rel=1e-10)

    def test_other_variants(self):
        assert mean_excess(LocExp(4.0, 1.0), 2.0) == pytest.approx(0.25)
        assert mean_excess(Uniform(4.0), 1.0) == pytest.approx(1.5)


class TestMoments:
    def test_gpd(self):
        mean, var = moments(GPD(0.2, 1.0))
        assert mean == pytest.approx(1.0 / 1.2)
        assert var == pytest.approx(1.0 / (1.44 * 1.4))

    def test_infinite_variance(self):
        assert moments(GPD(-0.7, 1.0))[1] == math.inf
        assert moments(Pareto(1.5, 1.0))[1] == math.inf

    def test_pareto(self):
        assert moments(Pareto(3.0, 2.0)) == (pytest.approx(3.0), pytest.approx(3.0))

    def test_no_mean(self):
        with pytest.raises(MomentExistenceError):
            moments(GPD(-1.0, 1.0))


class TestConjugate:
    def test_reference_limit(self):
        post = pareto_gamma_update(None, SuffStats.from_mle(33, 2.44))
        assert post.shape == pytest.approx(32.0)
        assert post.rate == pytest.approx(13.5246, abs=1e-4)
        assert post.mean == pytest.approx(2.3661, abs=1e-4)

    def test_reference_mean_and_mass(self):
        n, kappa_hat = 20, 1.7
        post = pareto_gamma_update(None, SuffStats.from_mle(n, kappa_hat))
        assert post.mean == pytest.approx((n - 1) * kappa_hat / n, rel=1e-12)
        mass, _ = quad(post.pdf, 0.0, np.inf)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_smallest_proper_reference(self):
        post = pareto_gamma_update(None, SuffStats.from_mle(2, 1.0))
        assert post.shape == pytest.approx(1.0)
        assert post.rate == pytest.approx(2.0)

    def test_conjugate_update(self):
        stats = SuffStats(t1=2.0, t2=4.0, n=3)
        post = pareto_gamma_update(ParetoGammaHyper(k=1.0, b=1.0, c=2.0, d=3.0), stats)
        assert post.shape == pytest.approx(5.0)
        assert post.rate == pytest.approx(3.0 + 5.0 * math.log(2.0))

    def test_continuous_in_prior_shape(self):
        stats = SuffStats(t1=2.0, t2=4.0, n=3)
        a = pareto_gamma_update(ParetoGammaHyper(1.0, 1.0, 1e-9, 1.0), stats)
        b = pareto_gamma_update(ParetoGammaHyper(1.0, 1.0, 2e-9, 1.0), stats)
        assert a.shape == pytest.approx(b.shape, abs=1e-8)

    def test_degenerate(self):
        with pytest.raises(DegenerateSampleError):
            pareto_gamma_update(None, SuffStats(t1=2.0, t2=2.0, n=3))

    def test_bad_hyper(self):
        with pytest.raises(ParameterDomainError):
            ParetoGammaHyper(k=0.0, b=1.0, c=1.0, d=1.0)

    def test_posterior_law(self):
        post = GammaPosterior(shape=3.0, rate=2.0)
        assert post.variance == pytest.approx(0.75)
        assert post.cdf(post.ppf(0.3)) == pytest.approx(0.3)
