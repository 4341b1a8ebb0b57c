"""Skewed-t posterior: parsing, likelihood identities, Jacobian bookkeeping."""

import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import dblquad

from randive.proposals import multiplier_log_density, sample_multiplier
from randive.rng import RngStream
from randive.samplers import ChainConfig, rdmh_componentwise_sweep
from randive.shareprice import (
    HyperParams,
    PriceSeries,
    SkewTParams,
    default_init,
    load_prices,
    log_posterior,
    posterior_target,
    run_shareprice_analysis,
    shareprice_proposals,
    synthetic_price_series,
)

HYPER = HyperParams()


def oracle_log_posterior(beta, sigma_t, nu_t, gamma_t, y):
    """Independent evaluation through scipy's t/expon/gamma densities.

    Includes the full change-of-variable constant log(2) of the
    gamma-squared map, so it sits exactly log(2) above the library value.
    """
    sigma, nu, gamma = math.exp(sigma_t), math.exp(nu_t), math.exp(gamma_t)
    z = np.where(y > beta, (y - beta) / (sigma * gamma), (y - beta) * gamma / sigma)
    loglik = y.size * (
        math.log(2.0) - math.log(gamma + 1.0 / gamma) - math.log(sigma)
    ) + stats.t.logpdf(z, df=nu).sum()
    phi = gamma * gamma
    logprior = (
        -math.log(sigma)
        + stats.expon.logpdf(nu, scale=1.0 / HYPER.d)
        + stats.gamma.logpdf(phi, HYPER.a, scale=1.0 / HYPER.b)
    )
    logjac = math.log(sigma) + math.log(nu) + math.log(2.0) + 2.0 * math.log(gamma)
    return float(loglik + logprior + logjac)


@pytest.fixture(scope="module")
def small_data():
    return synthetic_price_series(0.004, 0.012, 6.0, 0.8, n=40, seed=99)


class TestPriceSeries:
    def test_zero_return(self):
        ps = PriceSeries.from_prices([100.0, 100.0])
        assert ps.returns.tolist() == [0.0]

    def test_return_arithmetic(self):
        ps = PriceSeries.from_prices([100.0, 102.0, 96.9])
        assert ps.returns[0] == pytest.approx(0.02, abs=1e-15)
        assert ps.returns[1] == pytest.approx(-0.05, abs=1e-12)

    def test_fifty_prices_give_49_returns(self):
        prices = 100.0 + np.arange(50.0)
        assert PriceSeries.from_prices(prices).n == 49

    def test_plain_text_file(self, tmp_path):
        path = tmp_path / "prices.txt"
        path.write_text("100.0\n101.5\n99.25\n")
        ps = load_prices(path)
        assert ps.prices.tolist() == [100.0, 101.5, 99.25]

    def test_csv_with_header(self, tmp_path):
        path = tmp_path / "prices.csv"
        path.write_text("date,price\n1,100.0\n2,104.0\n3,98.0\n")
        ps = load_prices(path)
        assert ps.prices.tolist() == [100.0, 104.0, 98.0]

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("100.0\nnot-a-number\n")
        with pytest.raises(ValueError, match=":2"):
            load_prices(path)

    def test_nonpositive_price_rejected(self, tmp_path):
        path = tmp_path / "neg.txt"
        path.write_text("100.0\n-5.0\n")
        with pytest.raises(ValueError, match="positive"):
            load_prices(path)

    def test_too_short(self, tmp_path):
        path = tmp_path / "one.txt"
        path.write_text("100.0\n")
        with pytest.raises(ValueError, match="at least two"):
            load_prices(path)

    def test_missing_price_column(self, tmp_path):
        path = tmp_path / "cols.csv"
        path.write_text("date,close\n1,100.0\n2,101.0\n")
        with pytest.raises(ValueError, match="price"):
            load_prices(path)


class TestLogPosterior:
    def test_matches_independent_oracle_up_to_constant(self, small_data):
        y = small_data.returns
        rng = np.random.default_rng(12)
        for _ in range(50):
            beta = float(rng.normal(0.0, 0.02))
            sigma_t = float(rng.normal(math.log(0.012), 1.0))
            nu_t = float(rng.normal(math.log(8.0), 1.0))
            gamma_t = float(rng.normal(0.0, 0.5))
            mine = log_posterior(SkewTParams(beta, sigma_t, nu_t, gamma_t), small_data)
            ref = oracle_log_posterior(beta, sigma_t, nu_t, gamma_t, y)
            assert mine - ref == pytest.approx(-math.log(2.0), abs=1e-9)

    def test_symmetric_reduction_at_gamma_one(self, small_data):
        # gamma = 1 collapses the skewing bracket; likelihood becomes plain
        # Student-t in (y - beta)/sigma
        y = small_data.returns
        beta, sigma_t, nu_t = 0.002, math.log(0.012), math.log(5.0)
        params = SkewTParams(beta, sigma_t, nu_t, 0.0)
        sigma, nu = math.exp(sigma_t), math.exp(nu_t)
        loglik_sym = float(
            stats.t.logpdf((y - beta) / sigma, df=nu).sum() - y.size * math.log(sigma)
        )
        prior_and_jac = (
            -sigma_t
            + stats.expon.logpdf(nu, scale=1.0 / HYPER.d)
            + stats.gamma.logpdf(1.0, HYPER.a, scale=1.0 / HYPER.b)
            + sigma_t
            + nu_t
        )
        assert log_posterior(params, small_data) == pytest.approx(
            loglik_sym + float(prior_and_jac), abs=1e-9
        )

    def test_doubling_sigma_identity(self, small_data):
        base = SkewTParams(0.001, math.log(0.01), math.log(8.0), math.log(0.7))
        doubled = SkewTParams(0.001, math.log(0.02), math.log(8.0), math.log(0.7))
        mine = log_posterior(doubled, small_data) - log_posterior(base, small_data)
        ref = oracle_log_posterior(
            0.001, math.log(0.02), math.log(8.0), math.log(0.7), small_data.returns
        ) - oracle_log_posterior(
            0.001, math.log(0.01), math.log(8.0), math.log(0.7), small_data.returns
        )
        assert mine == pytest.approx(ref, abs=1e-9)

    def test_observation_at_beta_contributes_normalizer_only(self):
        prices = [100.0, 101.0, 101.0, 103.02]
        data = PriceSeries.from_prices(prices)
        assert np.any(data.returns == 0.0)
        params = SkewTParams(0.0, math.log(0.01), math.log(8.0), math.log(0.7))
        mine = log_posterior(params, data)
        ref = oracle_log_posterior(0.0, math.log(0.01), math.log(8.0), math.log(0.7), data.returns)
        assert math.isfinite(mine)
        assert mine - ref == pytest.approx(-math.log(2.0), abs=1e-9)

    def test_skew_symmetry_identity(self, small_data):
        # reflecting the data about beta while inverting gamma leaves the
        # likelihood invariant, so the posterior shifts by the closed-form
        # prior-and-jacobian difference only
        beta, sigma_t, nu_t, gamma_t = 0.003, math.log(0.015), math.log(6.0), 0.4
        y = small_data.returns
        data_reflected = PriceSeries(prices=small_data.prices, returns=2.0 * beta - y)
        lhs = log_posterior(SkewTParams(beta, sigma_t, nu_t, gamma_t), small_data)
        rhs = log_posterior(SkewTParams(beta, sigma_t, nu_t, -gamma_t), data_reflected)
        phi = math.exp(2.0 * gamma_t)
        expected_shift = (
            (HYPER.a - 1.0) * 4.0 * gamma_t - HYPER.b * (phi - 1.0 / phi) + 4.0 * gamma_t
        )
        assert lhs - rhs == pytest.approx(expected_shift, abs=1e-9)

    def test_finite_on_random_grid(self, small_data):
        rng = np.random.default_rng(13)
        target = posterior_target(small_data)
        for _ in range(1000):
            theta = rng.uniform(-5.0, 5.0, 4)
            val = target.log_density(theta)
            assert not math.isnan(val)
            assert val < math.inf

    def test_extreme_parameters_degrade_to_zero_density(self, small_data):
        target = posterior_target(small_data)
        assert target.log_density(np.array([0.0, 0.0, 800.0, 0.0])) == -math.inf
        assert target.log_density(np.array([0.0, 0.0, -800.0, 0.0])) == -math.inf
        assert target.log_density(np.array([0.0, 0.0, 0.0, 400.0])) == -math.inf
        assert math.isfinite(target.log_density(np.array([0.0, -350.0, 0.0, 0.0])))

    def test_jacobian_by_slice_quadrature(self):
        # integrate the transformed density over a (beta, log sigma) box and
        # the untransformed oracle density over the image box; the ratio
        # must equal the constant nu* gamma*^2 left out of the slice
        data = synthetic_price_series(0.004, 0.012, 6.0, 0.8, n=25, seed=100)
        y = data.returns
        nu_t, gamma_t = math.log(6.0), math.log(0.8)
        target = posterior_target(data)

        b_lo, b_hi = -0.004, 0.012
        s_lo, s_hi = math.log(0.008), math.log(0.02)

        transformed = dblquad(
            lambda s_t, b: math.exp(target.log_density(np.array([b, s_t, nu_t, gamma_t]))),
            b_lo,
            b_hi,
            s_lo,
            s_hi,
            epsabs=0.0,
            epsrel=1e-7,
        )[0]

        def untransformed(sigma, b):
            # oracle density with every transform Jacobian removed
            val = oracle_log_posterior(b, math.log(sigma), nu_t, gamma_t, y)
            val -= math.log(sigma) + nu_t + math.log(2.0) + 2.0 * gamma_t
            return math.exp(val)

        plain = dblquad(
            untransformed, b_lo, b_hi, math.exp(s_lo), math.exp(s_hi), epsabs=0.0, epsrel=1e-7
        )[0]
        const = math.exp(nu_t + 2.0 * gamma_t)
        assert transformed == pytest.approx(const * plain, rel=1e-4)


class TestProposals:
    def test_location_proposal_density(self):
        g_beta = shareprice_proposals()[0]
        assert math.exp(multiplier_log_density(g_beta, 0.5)) == pytest.approx(0.8, abs=1e-12)

    def test_each_integrates_to_one(self):
        from scipy.integrate import quad

        for p in shareprice_proposals():
            total = (
                quad(lambda e: math.exp(multiplier_log_density(p, e)), -1.0, 0.0, limit=400)[0]
                + quad(lambda e: math.exp(multiplier_log_density(p, e)), 0.0, 1.0, limit=400)[0]
            )
            assert total == pytest.approx(1.0, abs=1e-8)

    def test_positive_branch_weight(self):
        for i, p in enumerate(shareprice_proposals()):
            draws = sample_multiplier(p, RngStream(200 + i), size=1_000_000)
            assert abs((draws > 0).mean() - 0.8) < 0.002


class TestSynthetic:
    def test_deterministic(self):
        a = synthetic_price_series(0.005, 0.01, 8.0, 0.7, n=50, seed=1)
        b = synthetic_price_series(0.005, 0.01, 8.0, 0.7, n=50, seed=1)
        assert np.array_equal(a.prices, b.prices)

    def test_prices_positive_and_returns_consistent(self):
        ps = synthetic_price_series(0.005, 0.01, 8.0, 0.7, n=200, seed=2)
        assert np.all(ps.prices > 0.0)
        assert ps.n == 200

    def test_skew_direction(self):
        # gamma < 1 puts more mass below beta
        ps = synthetic_price_series(0.0, 0.01, 8.0, 0.5, n=20_000, seed=3)
        assert (ps.returns < 0.0).mean() > 0.6

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            synthetic_price_series(0.0, -1.0, 8.0, 0.7, n=10)


class TestAnalysis:
    def test_sweep_smoke(self, small_data):
        target = posterior_target(small_data)
        x = default_init(small_data)
        out = rdmh_componentwise_sweep(x, target, shareprice_proposals(), RngStream(300))
        assert out.shape == (4,)
        assert np.all(out != 0.0) and np.all(np.isfinite(out))

    def test_short_run_summaries(self, small_data):
        cfg = ChainConfig(
            n_iter=3000, burn_in=500, thin=5, init=default_init(small_data), seed=301
        )
        res = run_shareprice_analysis(small_data, cfg)
        assert set(res.summaries) == {"beta", "sigma", "nu", "gamma"}
        for entry in res.summaries.values():
            assert math.isfinite(entry["mean"]) and entry["sd"] > 0.0
        for name in ("sigma", "nu", "gamma"):
            assert res.summaries[name]["mean"] > 0.0
        assert 0.0 < res.trace.acceptance_rate < 1.0
        assert res.trace.states.shape == ((3000 - 500) // 5, 4)

    def test_default_init_nonzero(self, small_data):
        assert np.all(default_init(small_data) != 0.0)
