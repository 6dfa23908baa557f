import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import minimize

from wexpfit.censoring import HybridScheme, apply_scheme, generate_censored
from wexpfit.distribution import WEParams, mean, pdf, sample
from wexpfit.em import (EMConfig, alpha_of_beta, cond_log_B, cond_mean_A,
                        em_fit, m_step)
from wexpfit.likelihood import log1mexp, log_likelihood, score


def truncated_mean_quadrature(c, alpha, beta):
    p = WEParams.from_alpha_beta(alpha, beta)
    num, _ = quad(lambda z: z * pdf(p, z), c, np.inf, limit=200)
    den, _ = quad(lambda z: pdf(p, z), c, np.inf, limit=200)
    return num / den


class TestCondMeanA:
    def test_at_zero_equals_distribution_mean(self):
        assert cond_mean_A(0.0, 2.0, 2.0) == pytest.approx(4.0 / 3.0, rel=1e-12)
        for alpha, beta in ((0.5, 1.2), (3.0, 0.7)):
            assert cond_mean_A(0.0, alpha, beta) == pytest.approx(
                mean(WEParams.from_alpha_beta(alpha, beta)), rel=1e-12)

    def test_against_quadrature_oracle(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            alpha = float(rng.uniform(0.2, 6.0))
            beta = float(rng.uniform(0.2, 6.0))
            c = float(rng.uniform(0.0, 4.0 / beta))
            assert cond_mean_A(c, alpha, beta) == pytest.approx(
                truncated_mean_quadrature(c, alpha, beta), rel=1e-6)

    def test_against_monte_carlo(self):
        alpha, beta, c = 2.5, 7.5, 1.0
        p = WEParams.from_alpha_beta(alpha, beta)
        draws = sample(p, np.random.default_rng(5), 15_000_000)
        tail = draws[draws > c]
        se = tail.std() / math.sqrt(len(tail))
        assert abs(cond_mean_A(c, alpha, beta) - tail.mean()) < 3 * se

    def test_exceeds_threshold_and_exponential_tail(self):
        alpha, beta = 1.8, 0.9
        lam = beta / alpha
        for c in (0.0, 0.5, 5.0):
            assert cond_mean_A(c, alpha, beta) > c
        c = 100.0 / lam
        assert cond_mean_A(c, alpha, beta) - c == pytest.approx(1.0 / lam, abs=1e-6)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            cond_mean_A(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            cond_mean_A(1.0, 0.0, 1.0)


class TestCondLogB:
    def test_always_negative_and_vanishes_in_tail(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            alpha = float(rng.uniform(0.3, 5.0))
            beta = float(rng.uniform(0.3, 5.0))
            c = float(rng.uniform(0.0, 10.0 / beta))
            assert cond_log_B(c, alpha, beta) < 0.0
        alpha, beta = 2.0, 1.5
        lam = beta / alpha
        assert abs(cond_log_B(50.0 / lam, alpha, beta)) < 1e-6

    def test_against_monte_carlo(self):
        alpha, beta, c = 1.0, 1.0, 0.0
        p = WEParams.from_alpha_beta(alpha, beta)
        draws = sample(p, np.random.default_rng(6), 10_000_000)
        vals = log1mexp(beta * draws)
        se = vals.std() / math.sqrt(len(vals))
        assert abs(cond_log_B(c, alpha, beta) - vals.mean()) < 3 * se

    def test_depends_only_on_beta_c_product(self):
        for alpha in (0.4, 1.0, 3.3):
            assert cond_log_B(2.0, alpha, 1.0) == pytest.approx(
                cond_log_B(1.0, alpha, 2.0), abs=1e-9)

    def test_deep_tail_closed_form_continuity(self):
        # the closed-form shortcut takes over around beta*c = 13.8; in the
        # tail B ~ -exp(-beta c)/(alpha+1), so the seam must be smooth
        alpha = 1.7
        lo = cond_log_B(13.6, alpha, 1.0)
        hi = cond_log_B(14.0, alpha, 1.0)
        assert lo < hi < 0
        assert hi == pytest.approx(lo * math.exp(-0.4), rel=1e-3)


class TestAlphaOfBeta:
    def test_balanced_case(self):
        # beta * B = 2n makes the root sqrt(2)
        assert alpha_of_beta(2.0, 10.0, 10) == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_small_product_limit(self):
        assert alpha_of_beta(1e-9, 1.0, 10) == pytest.approx(0.0, abs=1e-8)

    def test_plugin_value(self):
        # n = 10, beta*B = 40: ((sqrt(2000) + 20) / 20) = 1 + sqrt(5)
        assert alpha_of_beta(4.0, 10.0, 10) == pytest.approx(1.0 + math.sqrt(5.0), rel=1e-14)

    def test_solves_stationarity_quadratic(self):
        rng = np.random.default_rng(41)
        for _ in range(50):
            beta, B, n = float(rng.uniform(0.1, 5)), float(rng.uniform(1, 50)), int(rng.integers(3, 60))
            a = alpha_of_beta(beta, B, n)
            assert n * a**2 - (beta * B - 2 * n) * a - beta * B == pytest.approx(0.0, abs=1e-8 * n)


class TestMStep:
    def test_fixed_point_residual(self, sim_data):
        cfg = EMConfig()
        A_k = cond_mean_A(sim_data.c, 2.0, 6.0)
        alpha, beta = m_step(sim_data, A_k, cfg, 6.0)
        B = sim_data.sum_times + (sim_data.n - sim_data.r) * A_k
        ex = np.exp(-beta * sim_data.times)
        h = sim_data.n / (B / alpha_of_beta(beta, B, sim_data.n)
                          - float(np.sum(sim_data.times * ex / (1 - ex))))
        assert abs(h - beta) < cfg.fp_tol * beta * 10

    def test_complete_data_zeroes_the_score(self):
        rng = np.random.default_rng(51)
        x = np.sort(rng.gamma(2.0, 0.4, size=25))
        data = apply_scheme(x, HybridScheme(25, 10, 1e9))
        fit = em_fit(data)
        assert fit.converged and data.case == "III"
        s = score(fit.alpha_hat, fit.beta_hat, data)
        assert abs(s.d_alpha) < 1e-4 * data.n
        assert abs(s.d_beta) < 1e-4 * data.n

    def test_against_grid_and_polish_oracle(self):
        # brute-force maximizer of the fixed-statistic objective
        rng = np.random.default_rng(52)
        x = np.sort(rng.gamma(2.0, 0.5, size=20))
        data = apply_scheme(x, HybridScheme(20, 12, float(np.quantile(x, 0.8))))
        A_k = cond_mean_A(data.c, 1.5, 3.0)
        B = data.sum_times + (data.n - data.r) * A_k

        def objective(p):
            a, b = np.exp(p)
            return -(data.n * np.log(a + 1) - 2 * data.n * np.log(a)
                     + data.n * np.log(b) - (b / a) * B
                     + float(log1mexp(b * data.times).sum()))

        grids = [(la, lb) for la in np.linspace(-2, 2.5, 40)
                 for lb in np.linspace(-1.5, 3, 40)]
        best = min(grids, key=objective)
        polished = minimize(objective, best, method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-14})
        a_star, b_star = np.exp(polished.x)
        alpha, beta = m_step(data, A_k, EMConfig(), data.r / data.sum_times)
        assert alpha == pytest.approx(a_star, rel=1e-3)
        assert beta == pytest.approx(b_star, rel=1e-3)


class TestEMFit:
    def test_full_data_matches_published_estimate(self, full_data):
        fit = em_fit(full_data)
        assert fit.converged
        assert fit.alpha_hat == pytest.approx(1.6232, abs=1.5e-3)
        assert fit.lambda_hat == pytest.approx(0.0138, abs=1e-4)

    def test_scheme1_fixed_point_is_self_consistent(self, scheme1):
        fit = em_fit(scheme1)
        assert fit.converged and fit.method == "em"
        # frozen regression values for the censored fit
        assert fit.beta_hat == pytest.approx(0.0239648, abs=2e-6)
        assert fit.alpha_hat == pytest.approx(1.7739787, abs=2e-5)
        # the E-step statistic at the fit reproduces the M-step stationarity
        A_star = cond_mean_A(scheme1.c, fit.alpha_hat, fit.beta_hat)
        B = scheme1.sum_times + (scheme1.n - scheme1.r) * A_star
        assert alpha_of_beta(fit.beta_hat, B, scheme1.n) == pytest.approx(
            fit.alpha_hat, rel=1e-6)

    def test_lambda_is_ratio(self, scheme1, scheme2):
        for data in (scheme1, scheme2):
            fit = em_fit(data)
            assert fit.lambda_hat == fit.beta_hat / fit.alpha_hat

    def test_trace_monotone_on_mildly_censored_data(self):
        rng = np.random.default_rng(61)
        checked = 0
        for _ in range(60):
            data = generate_censored(WEParams(2.5, 3.0), HybridScheme(40, 35, 2.0), rng)
            fit = em_fit(data)
            if not fit.converged or fit.method != "em":
                continue
            assert np.all(np.diff(fit.loglik_trace) > -1e-8)
            checked += 1
        assert checked >= 30

    def test_trace_decreases_are_bounded_under_heavy_censoring(self):
        # the published update drops a censored-tail term, which can cost
        # the ascent property a sliver; the slips stay tiny
        rng = np.random.default_rng(62)
        worst = 0.0
        for _ in range(60):
            data = generate_censored(WEParams(2.5, 3.0), HybridScheme(40, 30, 1.0), rng)
            fit = em_fit(data)
            if fit.converged and fit.method == "em":
                d = np.diff(fit.loglik_trace)
                if len(d):
                    worst = min(worst, float(d.min()))
        assert worst > -5e-3

    def test_initialization_robustness(self, scheme1):
        fits = []
        rng = np.random.default_rng(63)
        for _ in range(10):
            a0 = float(rng.uniform(0.3, 6.0))
            b0 = float(rng.uniform(0.005, 0.08))
            fit = em_fit(scheme1, EMConfig(init=(a0, b0)))
            assert fit.converged
            fits.append((fit.alpha_hat, fit.beta_hat))
        alphas = np.array([f[0] for f in fits])
        betas = np.array([f[1] for f in fits])
        assert np.ptp(alphas) / alphas.mean() < 1e-3
        assert np.ptp(betas) / betas.mean() < 1e-3

    def test_requires_two_observations(self):
        data = apply_scheme(np.array([1.0, 2.0]), HybridScheme(2, 1, 1.5))
        assert data.r == 1
        with pytest.raises(ValueError):
            em_fit(data)

    def test_record_round_trip(self, scheme1):
        rec = em_fit(scheme1).to_record()
        assert set(rec) >= {"alpha", "beta", "lambda", "iterations",
                            "converged", "method", "loglik_trace"}
