"""Chi-square distribution functions against independent oracles."""

import math

import numpy as np
import pytest

from graphcorr import (
    GraphCorrError,
    chi2_cdf,
    chi2_quantile,
    noncentral_chi2_cdf,
    sbm_noncentrality,
    sbm_theoretical_power,
)


def series_gamma_cdf(x, df, terms=500):
    """Regularized lower incomplete gamma by its power series; oracle path."""
    a = df / 2.0
    z = x / 2.0
    if z == 0:
        return 0.0
    total = 0.0
    term = 1.0 / a
    k = 0
    while k < terms:
        total += term
        k += 1
        term *= z / (a + k)
        if term < 1e-18 * max(total, 1.0):
            break
    return total * math.exp(-z + a * math.log(z) - math.lgamma(a))


def bisect_quantile(p, df):
    lo, hi = 0.0, 1.0
    while series_gamma_cdf(hi, df) < p:
        hi *= 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if series_gamma_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class TestCentral:
    def test_cdf_at_zero(self):
        for df in (1, 2, 3, 10):
            assert chi2_cdf(0.0, df) == 0.0

    def test_df2_closed_form(self):
        for x in np.linspace(0.01, 30, 50):
            assert chi2_cdf(x, 2) == pytest.approx(1 - math.exp(-x / 2), abs=1e-10)

    def test_cdf_matches_series_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            df = int(rng.integers(1, 20))
            x = float(rng.uniform(0, 50))
            assert chi2_cdf(x, df) == pytest.approx(series_gamma_cdf(x, df), abs=1e-10)

    def test_quantile_095_df3_from_bisection_oracle(self):
        oracle = bisect_quantile(0.95, 3)
        assert oracle == pytest.approx(7.8147, abs=5e-4)
        assert chi2_quantile(0.95, 3) == pytest.approx(oracle, abs=1e-8)

    def test_quantile_round_trip(self):
        for p in (0.01, 0.2, 0.5, 0.9, 0.99):
            for df in (1, 2, 5, 17):
                assert chi2_cdf(chi2_quantile(p, df), df) == pytest.approx(p, abs=1e-7)

    def test_cdf_monotone_and_bounded(self):
        xs = np.linspace(0, 40, 200)
        vals = [chi2_cdf(x, 4) for x in xs]
        assert all(0.0 <= v <= 1.0 for v in vals)
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        with pytest.raises(GraphCorrError):
            chi2_cdf(-1.0, 3)
        with pytest.raises(GraphCorrError):
            chi2_quantile(0.0, 3)
        with pytest.raises(GraphCorrError):
            chi2_cdf(1.0, 0)


class TestNoncentral:
    def test_zero_noncentrality_reduces_exactly(self):
        for x in (0.5, 3.0, 11.0):
            for df in (1, 3, 8):
                assert noncentral_chi2_cdf(x, df, 0.0) == chi2_cdf(x, df)

    def test_monte_carlo_oracle_df3(self):
        """Survival at the 95% central quantile under noncentrality 7.8 from
        a million direct draws of (Z1 + sqrt(mu))^2 + Z2^2 + Z3^2."""
        mu = 7.8
        x = chi2_quantile(0.95, 3)
        rng = np.random.default_rng(2)
        z = rng.standard_normal((1_000_000, 3))
        z[:, 0] += math.sqrt(mu)
        draws = (z**2).sum(axis=1)
        mc = float((draws <= x).mean())
        val = noncentral_chi2_cdf(x, 3, mu)
        assert val == pytest.approx(mc, abs=0.002)
        assert 1 - val == pytest.approx(0.64, abs=0.01)

    def test_nonincreasing_in_noncentrality(self):
        vals = [noncentral_chi2_cdf(7.0, 4, mu) for mu in np.linspace(0, 30, 40)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))

    def test_large_noncentrality_does_not_underflow(self):
        v = noncentral_chi2_cdf(900.0, 3, 800.0)
        assert 0.0 < v < 1.0

    def test_domain_errors(self):
        with pytest.raises(GraphCorrError):
            noncentral_chi2_cdf(1.0, 3, -0.5)


class TestTheoreticalPower:
    def test_zero_correlation_gives_alpha(self):
        for alpha in (0.01, 0.05, 0.2):
            assert sbm_theoretical_power(3, 500, 0.0, alpha) == pytest.approx(
                alpha, abs=1e-12
            )

    def test_noncentrality_formula(self):
        # K=2, n=1000, r=0.005: 0.000025 * (5/16 * 1e6 - 500)
        assert sbm_noncentrality(2, 1000, 0.005) == pytest.approx(7.8, abs=1e-12)

    def test_reference_cells(self):
        assert sbm_theoretical_power(2, 1000, 0.005, 0.05) == pytest.approx(
            0.642, abs=0.005
        )
        assert sbm_theoretical_power(5, 2000, 0.005, 0.05) == pytest.approx(
            0.932, abs=0.005
        )

    def test_power_increases_with_signal(self):
        powers = [sbm_theoretical_power(2, 1000, r, 0.05) for r in (0, 0.002, 0.005, 0.01)]
        assert all(b > a for a, b in zip(powers, powers[1:]))
