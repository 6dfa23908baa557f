import numpy as np
import pytest
from scipy.stats import binom

from wexpfit.censoring import CensoredData, HybridScheme, apply_scheme, generate_censored
from wexpfit.distribution import WEParams, cdf


SAMPLE = np.array([1.0, 2.0, 3.0, 4.0, 5.0])


class TestScheme:
    @pytest.mark.parametrize("n,R,T", [(1, 1, 1.0), (5, 0, 1.0), (5, 6, 1.0),
                                       (5, 3, 0.0), (5, 3, np.inf)])
    def test_rejects_bad_scheme(self, n, R, T):
        with pytest.raises(ValueError):
            HybridScheme(n=n, R=R, T=T)


class TestApplyScheme:
    def test_case_i(self):
        d = apply_scheme(SAMPLE, HybridScheme(5, 3, 1.5))
        assert (d.case, d.r, d.c) == ("I", 3, 3.0)
        assert np.array_equal(d.times, [1.0, 2.0, 3.0])

    def test_case_ii(self):
        d = apply_scheme(SAMPLE, HybridScheme(5, 3, 3.5))
        assert (d.case, d.r, d.c) == ("II", 3, 3.5)

    def test_case_iii(self):
        d = apply_scheme(SAMPLE, HybridScheme(5, 3, 10.0))
        assert (d.case, d.r, d.c) == ("III", 5, 10.0)

    def test_boundary_failure_counts_as_failed(self):
        # unit failing exactly at T is treated as failed before T
        d = apply_scheme(SAMPLE, HybridScheme(5, 3, 3.0))
        assert (d.case, d.r, d.c) == ("II", 3, 3.0)

    def test_rejects_ties_by_default(self):
        with pytest.raises(ValueError, match="ties"):
            apply_scheme([1.0, 2.0, 2.0, 4.0, 5.0], HybridScheme(5, 3, 3.5))
        d = apply_scheme([1.0, 2.0, 2.0, 4.0, 5.0], HybridScheme(5, 3, 3.5),
                         allow_ties=True)
        assert d.r == 3

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError, match="length"):
            apply_scheme(SAMPLE, HybridScheme(6, 3, 3.5))

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            apply_scheme([-1.0, 2.0, 3.0, 4.0, 5.0], HybridScheme(5, 3, 3.5))

    def test_case_partition_properties(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(3, 30))
            R = int(rng.integers(1, n + 1))
            T = float(rng.uniform(0.05, 3.0))
            x = np.sort(rng.uniform(0.01, 2.5, size=n))
            if np.any(np.diff(x) <= 0):
                continue
            d = apply_scheme(x, HybridScheme(n, R, T))
            assert R <= d.r <= n
            assert d.c >= d.times[-1]
            if d.case == "I":
                assert d.r == R and d.times[-1] > T and d.c == d.times[-1]
            elif d.case == "II":
                assert R <= d.r < n and d.c == T
            else:
                assert d.r == n and d.times[-1] < T  # boundary equals handled as II


class TestGenerate:
    def test_huge_clock_always_complete(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            d = generate_censored(WEParams(2.5, 3.0), HybridScheme(12, 5, 1e9), rng)
            assert d.case == "III" and d.r == 12

    def test_full_quota_never_case_ii(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            d = generate_censored(WEParams(2.0, 2.0), HybridScheme(8, 8, 0.7), rng)
            assert d.case in ("I", "III")

    def test_deterministic(self):
        p, s = WEParams(2.5, 3.0), HybridScheme(15, 10, 0.5)
        a = generate_censored(p, s, np.random.default_rng(9))
        b = generate_censored(p, s, np.random.default_rng(9))
        assert np.array_equal(a.times, b.times) and a.case == b.case

    def test_case_i_probability(self):
        # case I iff fewer than R failures by T; the count is
        # Binomial(n, F(T)), an oracle independent of apply_scheme
        p, s = WEParams(2.5, 3.0), HybridScheme(40, 35, 1.0)
        p_oracle = float(binom.cdf(s.R - 1, s.n, cdf(p, s.T)))
        rng = np.random.default_rng(123)
        reps = 30_000
        hits = sum(generate_censored(p, s, rng).case == "I" for _ in range(reps))
        se = np.sqrt(p_oracle * (1 - p_oracle) / reps)
        assert abs(hits / reps - p_oracle) < 3 * se


class TestRecord:
    def test_round_trip(self, scheme1):
        rec = scheme1.to_record()
        assert rec["case"] == "II" and rec["r"] == 69 and rec["c"] == 300.0
        back = CensoredData.from_record(rec)
        assert np.array_equal(back.times, scheme1.times)
        assert back.scheme == scheme1.scheme
