import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.stats import kstest

from wexpfit.distribution import WEParams, cdf, mean, pdf, quantile, sample


class TestParams:
    def test_beta_identity(self):
        p = WEParams(alpha=2.5, lam=3.0)
        assert p.beta == 2.5 * 3.0

    def test_round_trip_alpha_beta(self):
        p = WEParams.from_alpha_beta(2.5, 7.5)
        assert p.lam == 7.5 / 2.5
        assert p.beta == 7.5

    @pytest.mark.parametrize("alpha,lam", [(-1, 1), (0, 1), (1, 0), (np.nan, 1),
                                           (1, np.inf), (1e13, 1), (1, 1e-13)])
    def test_rejects_bad_params(self, alpha, lam):
        with pytest.raises(ValueError):
            WEParams(alpha=alpha, lam=lam)


class TestPdfCdf:
    def test_pdf_zero_at_origin(self):
        assert pdf(WEParams(3.7, 0.4), 0.0) == 0.0

    def test_pdf_standard_point(self):
        # ((1+1)/1) * 1 * e^{-ln 2} * (1 - e^{-ln 2}) = 2 * 1/2 * 1/2
        assert pdf(WEParams(1.0, 1.0), math.log(2.0)) == pytest.approx(0.5, abs=1e-14)

    def test_pdf_integrates_to_one(self):
        p = WEParams(2.5, 3.0)
        total, err = quad(lambda x: pdf(p, x), 0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_pdf_rejects_bad_x(self):
        p = WEParams(1.0, 1.0)
        for bad in (-1.0, np.nan, np.inf):
            with pytest.raises(ValueError):
                pdf(p, bad)

    def test_cdf_at_zero_and_tail(self):
        p = WEParams(2.5, 3.0)
        assert cdf(p, 0.0) == 0.0
        assert cdf(p, 50.0 / p.lam) == pytest.approx(1.0, abs=1e-10)

    def test_cdf_alpha_one_closed_form(self):
        # at alpha = 1 the law is the max of two iid exponentials
        p = WEParams(1.0, 1.0)
        x = np.linspace(0.01, 6.0, 40)
        assert cdf(p, x) == pytest.approx((1.0 - np.exp(-x)) ** 2, abs=1e-12)
        assert cdf(p, math.log(2.0)) == pytest.approx(0.25, abs=1e-14)

    def test_cdf_monotone(self):
        p = WEParams(0.7, 2.2)
        vals = cdf(p, np.linspace(0, 10, 500))
        assert np.all(np.diff(vals) >= 0)

    def test_parametrization_consistency(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            alpha = float(rng.uniform(0.1, 8.0))
            lam = float(rng.uniform(0.1, 8.0))
            x = rng.uniform(0.0, 5.0 / lam, size=8)
            direct = WEParams(alpha=alpha, lam=lam)
            via_beta = WEParams.from_alpha_beta(alpha, alpha * lam)
            assert pdf(direct, x) == pytest.approx(pdf(via_beta, x), rel=1e-14)
            assert cdf(direct, x) == pytest.approx(cdf(via_beta, x), rel=1e-14)

    def test_cdf_derivative_matches_pdf(self):
        p = WEParams(2.5, 3.0)
        scale = 1.0 / p.lam
        h = 1e-5 * scale
        x = np.linspace(0.05, 6.0, 60) * scale
        num = (cdf(p, x + h) - cdf(p, x - h)) / (2 * h)
        assert num == pytest.approx(pdf(p, x), abs=1e-6)


class TestQuantile:
    def test_closed_form_alpha_one(self):
        p = WEParams(1.0, 1.0)
        assert quantile(p, 0.25) == pytest.approx(math.log(2.0), abs=1e-10)
        # (1 - e^{-x})^2 = 1/2  =>  x = -ln(1 - 1/sqrt(2))
        assert quantile(p, 0.5) == pytest.approx(-math.log(1 - 1 / math.sqrt(2)), abs=1e-10)

    def test_round_trip_through_cdf(self):
        p = WEParams(2.5, 3.0)
        for x in (0.1, 1.0, 5.0):
            assert quantile(p, float(cdf(p, x))) == pytest.approx(x, abs=1e-8)

    def test_probability_grid(self):
        p = WEParams(0.4, 1.7)
        for prob in np.arange(0.01, 1.0, 0.01):
            assert cdf(p, quantile(p, float(prob))) == pytest.approx(prob, abs=1e-8)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.3])
    def test_rejects_bad_probability(self, bad):
        with pytest.raises(ValueError):
            quantile(WEParams(1.0, 1.0), bad)


class TestSampling:
    def test_mean_of_draws(self):
        p = WEParams(2.0, 1.0)
        draws = sample(p, np.random.default_rng(7), 1_000_000)
        # mean (alpha+2)/(lam (alpha+1)) = 4/3; variance of the sum law
        var = 1.0 / p.lam**2 + 1.0 / (p.lam * (p.alpha + 1.0)) ** 2
        se = math.sqrt(var / len(draws))
        assert abs(draws.mean() - 4.0 / 3.0) < 4 * se

    def test_ks_against_cdf(self):
        p = WEParams(2.5, 3.0)
        draws = sample(p, np.random.default_rng(11), 100_000)
        stat = kstest(draws, lambda x: cdf(p, x)).statistic
        assert stat < 1.63 / math.sqrt(len(draws))  # 1% critical value

    def test_alpha_one_is_max_of_two_exponentials(self):
        p = WEParams(1.0, 2.0)
        draws = sample(p, np.random.default_rng(3), 100_000)
        stat = kstest(draws, lambda x: (1.0 - np.exp(-p.lam * x)) ** 2).statistic
        assert stat < 1.63 / math.sqrt(len(draws))

    def test_deterministic_given_seed(self):
        p = WEParams(1.5, 0.8)
        a = sample(p, np.random.default_rng(42), 1000)
        b = sample(p, np.random.default_rng(42), 1000)
        assert np.array_equal(a, b)

    def test_rejects_bad_count(self):
        with pytest.raises(ValueError):
            sample(WEParams(1.0, 1.0), np.random.default_rng(0), 0)


class TestMean:
    def test_against_quadrature(self):
        p = WEParams(2.0, 1.0)
        m, _ = quad(lambda x: x * pdf(p, x), 0, np.inf)
        assert mean(p) == pytest.approx(m, abs=1e-9)
        assert mean(p) == pytest.approx(4.0 / 3.0, abs=1e-12)

    def test_large_alpha_limit(self):
        # WE degenerates toward Exp(lam)
        assert mean(WEParams(1e6, 2.0)) == pytest.approx(0.5, abs=1e-5)

    def test_max_of_two_exponentials(self):
        assert mean(WEParams(1.0, 1.0)) == pytest.approx(1.5, abs=1e-12)
