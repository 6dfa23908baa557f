import numpy as np
import pytest

from wexpfit.censoring import CensoredData, HybridScheme, apply_scheme, generate_censored
from wexpfit.distribution import WEParams, cdf, pdf
from wexpfit.em import em_fit
from wexpfit.likelihood import log1mexp, log_likelihood, score


def random_instance(rng):
    n = int(rng.integers(6, 25))
    R = int(rng.integers(2, n))
    T = float(rng.uniform(0.2, 2.0))
    x = np.sort(rng.gamma(2.0, 0.3, size=n))
    data = apply_scheme(x, HybridScheme(n, R, T))
    alpha = float(rng.uniform(0.3, 5.0))
    beta = float(rng.uniform(0.3, 8.0))
    return alpha, beta, data


class TestLog1mexp:
    def test_matches_naive_in_safe_range(self):
        t = np.linspace(0.5, 30, 100)
        assert log1mexp(t) == pytest.approx(np.log(1 - np.exp(-t)), rel=1e-13)

    def test_small_argument_stability(self):
        # naive form loses all digits near t = 1e-12
        assert log1mexp(np.array(1e-12)) == pytest.approx(np.log(1e-12), rel=1e-9)


class TestLogLikelihood:
    def test_case_iii_equals_complete_data_form(self, rng=np.random.default_rng(2)):
        x = np.sort(rng.gamma(2.0, 0.4, size=12))
        data = apply_scheme(x, HybridScheme(12, 5, 1e6))
        assert data.case == "III"
        alpha, beta = 1.7, 2.3
        n = 12
        complete = (n * np.log(alpha + 1) - 2 * n * np.log(alpha) + n * np.log(beta)
                    - (beta / alpha) * x.sum() + np.sum(np.log(1 - np.exp(-beta * x))))
        assert log_likelihood(alpha, beta, data) == pytest.approx(complete, rel=1e-12)

    def test_matches_direct_density_product(self):
        # independent path: the (alpha, lam) density and survival directly
        rng = np.random.default_rng(3)
        x = np.sort(rng.gamma(2.0, 0.4, size=5))
        data = apply_scheme(x, HybridScheme(5, 2, float(x[2] + 0.01)))
        assert data.r < 5
        alpha, beta = 1.3, 2.1
        p = WEParams.from_alpha_beta(alpha, beta)
        direct = (np.sum(np.log(pdf(p, data.times)))
                  + (5 - data.r) * np.log(1.0 - cdf(p, data.c)))
        assert log_likelihood(alpha, beta, data) == pytest.approx(direct, abs=1e-10)

    def test_continuity_across_case_boundary(self, rng=np.random.default_rng(4)):
        x = np.sort(rng.gamma(2.0, 0.4, size=10))
        eps = 1e-9
        below = apply_scheme(x, HybridScheme(10, 4, float(x[6] - eps)))
        above = apply_scheme(x, HybridScheme(10, 4, float(x[6] + eps)))
        assert below.r == above.r - 1
        ll_b = log_likelihood(1.5, 2.0, below)
        ll_a = log_likelihood(1.5, 2.0, above)
        # r and c swap roles; the value moves continuously through the pdf/sf ratio
        assert ll_a == pytest.approx(ll_b + np.log(pdf(WEParams.from_alpha_beta(1.5, 2.0), x[6]))
                                     - np.log(1 - cdf(WEParams.from_alpha_beta(1.5, 2.0), x[6])),
                                     abs=1e-5)

    def test_local_maximality_at_em_fit(self, scheme1):
        fit = em_fit(scheme1)
        base = log_likelihood(fit.alpha_hat, fit.beta_hat, scheme1)
        rng = np.random.default_rng(8)
        for _ in range(200):
            a = fit.alpha_hat * float(rng.uniform(0.8, 1.2))
            b = fit.beta_hat * float(rng.uniform(0.8, 1.2))
            if (a, b) == (fit.alpha_hat, fit.beta_hat):
                continue
            assert log_likelihood(a, b, scheme1) < base

    def test_rejects_nonpositive_parameters(self, sim_data):
        for a, b in ((0.0, 1.0), (1.0, -2.0), (np.nan, 1.0)):
            with pytest.raises(ValueError):
                log_likelihood(a, b, sim_data)


class TestScore:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            alpha, beta, data = random_instance(rng)
            s = score(alpha, beta, data)
            ha, hb = 1e-6 * alpha, 1e-6 * beta
            fd_a = (log_likelihood(alpha + ha, beta, data)
                    - log_likelihood(alpha - ha, beta, data)) / (2 * ha)
            fd_b = (log_likelihood(alpha, beta + hb, data)
                    - log_likelihood(alpha, beta - hb, data)) / (2 * hb)
            assert s.d_alpha == pytest.approx(fd_a, rel=1e-4, abs=1e-7 * data.n)
            assert s.d_beta == pytest.approx(fd_b, rel=1e-4, abs=1e-7 * data.n)

    def test_alpha_score_vanishes_at_em_fixed_point(self):
        # the M-step alpha equation coincides with the observed-data one,
        # so d_alpha is ~0 at convergence; d_beta keeps a censored-tail
        # remainder of order (n-r) (the update drops that term)
        rng = np.random.default_rng(12)
        checked = 0
        for _ in range(30):
            data = generate_censored(WEParams(2.5, 3.0), HybridScheme(40, 30, 1.0), rng)
            fit = em_fit(data)
            if not fit.converged or fit.method != "em":
                continue
            s = score(fit.alpha_hat, fit.beta_hat, data)
            assert abs(s.d_alpha) < 1e-4 * data.n
            assert abs(s.d_beta) * fit.beta_hat < 0.05 * data.n
            checked += 1
        assert checked >= 10

    def test_case_iii_beta_score_reduction(self):
        rng = np.random.default_rng(13)
        x = np.sort(rng.gamma(2.0, 0.4, size=9))
        data = apply_scheme(x, HybridScheme(9, 3, 1e6))
        alpha, beta = 1.4, 2.6
        s = score(alpha, beta, data)
        reduced = (9 / beta - x.sum() / alpha
                   + np.sum(x * np.exp(-beta * x) / (1 - np.exp(-beta * x))))
        assert s.d_beta == pytest.approx(reduced, rel=1e-12)
