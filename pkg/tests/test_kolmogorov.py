import math

import mpmath
import numpy as np
import pytest

from condks import (
    AUTO_EXACT_LIMIT,
    KolmogorovDistribution,
    asymptotic_cdf,
    asymptotic_critical_value,
    critical_value,
    exact_cdf,
    p_value,
)


def series_oracle(x: float, terms: int = 50) -> float:
    """Independent high-precision partial sum of the limiting series."""
    with mpmath.workdps(60):
        s = mpmath.mpf(0)
        for k in range(1, terms + 1):
            s += (-1) ** (k - 1) * mpmath.exp(-2 * k * k * mpmath.mpf(x) ** 2)
        return float(1 - 2 * s)


GRID_X = [round(0.1 * i, 10) for i in range(1, 31)]


class TestAsymptoticCdf:
    def test_matches_high_precision_series(self):
        for x in GRID_X:
            assert asymptotic_cdf(x) == pytest.approx(series_oracle(x), abs=1e-10)

    def test_zero_below_cutoff(self):
        for x in (-3.0, -1e-9, 0.0, 0.02, 0.0499):
            assert asymptotic_cdf(x) == 0.0

    def test_frozen_quantile_anchor(self):
        # 95th percentile of the limiting law
        assert asymptotic_cdf(1.3581) == pytest.approx(0.9500003696, abs=1e-10)

    def test_range_and_monotonicity(self):
        xs = np.linspace(0.0, 5.0, 2000)
        vals = np.array([asymptotic_cdf(float(x)) for x in xs])
        assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
        # below ~0.2 the true value is under 1e-16 and the alternating
        # sum leaves cancellation noise, so allow float-level slack there
        assert np.all(np.diff(vals) >= -2e-15)
        strict = vals[xs >= 0.25]
        assert np.all(np.diff(strict) >= 0.0)

    def test_saturates_to_one(self):
        assert asymptotic_cdf(5.0) == pytest.approx(1.0, abs=1e-10)
        assert asymptotic_cdf(50.0) == 1.0


class TestExactCdf:
    def test_n1_closed_form(self):
        for d in np.linspace(0.5, 1.0, 100):
            want = 2.0 * float(d) - 1.0
            assert exact_cdf(1, float(d)) == pytest.approx(want, abs=1e-12)

    def test_boundaries(self):
        for n in (1, 3, 17, 60):
            lower = 1.0 / (2.0 * n)
            assert exact_cdf(n, -0.2) == 0.0
            assert exact_cdf(n, 0.0) == 0.0
            assert exact_cdf(n, lower) == 0.0
            assert exact_cdf(n, 0.5 * lower) == 0.0
            assert exact_cdf(n, 1.0) == 1.0
            assert exact_cdf(n, 1.7) == 1.0

    def test_dkw_saturation(self):
        # once 2 exp(-2 n d^2) < 1e-16 the result is exactly 1
        n = 50
        d = math.sqrt(-math.log(0.4e-16) / (2 * n))
        assert exact_cdf(n, d) == 1.0

    def test_matches_monte_carlo(self):
        rng = np.random.default_rng(314159)
        for n, grid in ((5, np.linspace(0.2, 0.62, 10)),
                        (20, np.linspace(0.12, 0.34, 10))):
            u = np.sort(rng.random((200_000, n)), axis=1)
            i = np.arange(1, n + 1)
            stats = np.maximum(i / n - u, u - (i - 1) / n).max(axis=1)
            for d in grid:
                freq = float(np.mean(stats <= d))
                assert exact_cdf(n, float(d)) == pytest.approx(freq, abs=0.004)

    def test_monotone_in_d(self):
        for n in (1, 2, 7, 20, 100, 1000):
            ds = np.linspace(0.0, 1.0, 1500)
            vals = [exact_cdf(n, float(d)) for d in ds]
            assert np.all(np.diff(vals) >= 0.0)

    def test_range(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(1, 300))
            d = float(rng.random())
            v = exact_cdf(n, d)
            assert 0.0 <= v <= 1.0

    def test_large_n_regression_anchor(self):
        # cross-checked against an independent float128 run of the same
        # matrix method (agreement 3e-15)
        assert exact_cdf(10_000, 0.0136) == pytest.approx(0.950964192028, abs=1e-9)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            exact_cdf(0, 0.5)


class TestPValue:
    def test_exact_complement_identity(self):
        for n in (1, 4, 20, 111):
            for d in np.linspace(0.0, 1.0, 101):
                c = exact_cdf(n, float(d))
                p = p_value(float(d), n, "exact")
                assert p + c == 1.0

    def test_degenerate_single_sample(self):
        assert p_value(0.5, 1, "exact") == 1.0

    def test_asymptotic_mode(self):
        for n, d in ((30, 0.2), (500, 0.04), (10_000, 0.011)):
            want = 1.0 - asymptotic_cdf(math.sqrt(n) * d)
            assert p_value(d, n, "asymptotic") == want

    def test_auto_switches_at_limit(self):
        d = 0.09
        assert p_value(d, AUTO_EXACT_LIMIT, "auto") == p_value(d, AUTO_EXACT_LIMIT, "exact")
        n_above = AUTO_EXACT_LIMIT + 1
        assert p_value(d, n_above, "auto") == p_value(d, n_above, "asymptotic")

    def test_auto_close_to_asymptotic_for_large_n(self):
        d = 0.012
        assert p_value(d, 10_000, "auto") == pytest.approx(
            p_value(d, 10_000, "asymptotic"), abs=1e-3
        )

    def test_input_validation(self):
        with pytest.raises(ValueError):
            p_value(-0.1, 10)
        with pytest.raises(ValueError):
            p_value(1.1, 10)
        with pytest.raises(ValueError):
            p_value(0.3, 0)
        with pytest.raises(ValueError):
            p_value(0.3, 10, "bogus")


class TestCriticalValue:
    @pytest.mark.parametrize("n", [1, 5, 20, 100])
    @pytest.mark.parametrize("alpha", [0.2, 0.1, 0.05, 0.01])
    def test_round_trip(self, n, alpha):
        c = critical_value(n, alpha)
        assert 1.0 / (2.0 * n) < c <= 1.0
        assert exact_cdf(n, c) >= 1.0 - alpha
        # smallest such value: a hair below must fall short
        assert exact_cdf(n, c - 2e-10) < 1.0 - alpha

    def test_textbook_anchor(self):
        # classic table value for n = 2, alpha = 0.05 is 0.84189
        assert critical_value(2, 0.05) == pytest.approx(0.84189, abs=5e-5)

    def test_decreasing_in_alpha(self):
        crits = [critical_value(25, a) for a in (0.3, 0.1, 0.05, 0.01, 0.001)]
        assert all(a < b for a, b in zip(crits, crits[1:]))

    def test_approaches_lower_bound_as_alpha_to_one(self):
        n = 5
        c = critical_value(n, 1.0 - 1e-7)
        assert 1.0 / (2.0 * n) < c < 1.0 / (2.0 * n) + 0.02

    def test_input_validation(self):
        for bad in (0.0, 1.0, -0.3, 2.0):
            with pytest.raises(ValueError):
                critical_value(10, bad)
        with pytest.raises(ValueError):
            critical_value(0, 0.05)


class TestAsymptoticCriticalValue:
    def test_matches_frozen_anchor(self):
        assert asymptotic_critical_value(0.05) == pytest.approx(1.3581, abs=1e-4)

    def test_round_trip(self):
        for alpha in (0.2, 0.1, 0.05, 0.01):
            x = asymptotic_critical_value(alpha)
            assert asymptotic_cdf(x) == pytest.approx(1.0 - alpha, abs=1e-9)


class TestKolmogorovDistribution:
    def test_exact_dispatch(self):
        dist = KolmogorovDistribution(n=20)
        assert dist.is_exact
        assert dist.cdf(0.3) == exact_cdf(20, 0.3)

    def test_asymptotic_dispatch(self):
        dist = KolmogorovDistribution()
        assert not dist.is_exact
        assert dist.cdf(1.0) == asymptotic_cdf(1.0)

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            KolmogorovDistribution(n=0)
