"""Stream determinism and distributional checks for the elementary samplers."""

import numpy as np
import pytest
from scipy import stats

from randive.rng import RngStream, sample_beta, sample_cauchy, sample_normal, uniform01


def draw_everything(rng, n=500):
    return np.concatenate(
        [
            uniform01(rng, n),
            sample_normal(rng, 1.0, 2.0, n),
            sample_beta(rng, 0.5, 1.5, n),
            sample_cauchy(rng, 0.0, 1.0, n),
        ]
    )


class TestStreams:
    def test_same_key_bit_identical(self):
        a = draw_everything(RngStream(42, 3))
        b = draw_everything(RngStream(42, 3))
        assert np.array_equal(a, b)

    def test_scalar_and_repeat_determinism(self):
        r1, r2 = RngStream(1, 0), RngStream(1, 0)
        for _ in range(100):
            assert uniform01(r1) == uniform01(r2)

    def test_distinct_indices_differ(self, rng_pair):
        a, b = rng_pair
        assert not np.array_equal(uniform01(a, 100), uniform01(b, 100))

    def test_distinct_streams_uncorrelated(self):
        a = uniform01(RngStream(9, 0), 100_000)
        b = uniform01(RngStream(9, 1), 100_000)
        corr = np.corrcoef(a, b)[0, 1]
        assert abs(corr) < 0.02

    def test_seed_validation(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            RngStream(2**64)
        with pytest.raises(ValueError):
            RngStream(1, -2)

    def test_pickle_roundtrip_resumes(self):
        import pickle

        r = RngStream(7, 2)
        uniform01(r, 10)
        clone = pickle.loads(pickle.dumps(r))
        assert np.array_equal(uniform01(r, 20), uniform01(clone, 20))


class TestUniform01:
    def test_open_interval(self):
        u = uniform01(RngStream(5), 200_000)
        assert np.all(u > 0.0) and np.all(u < 1.0)

    def test_mean(self):
        u = uniform01(RngStream(11), 1_000_000)
        assert abs(u.mean() - 0.5) < 0.002


class TestNormal:
    def test_parameter_error(self):
        with pytest.raises(ValueError):
            sample_normal(RngStream(0), 5.0, 0.0)
        with pytest.raises(ValueError):
            sample_normal(RngStream(0), 5.0, -1.0)

    def test_mean(self):
        z = sample_normal(RngStream(21), 0.0, 1.0, 1_000_000)
        assert abs(z.mean()) < 0.004

    def test_variance(self):
        z = sample_normal(RngStream(22), 10.0, 0.25, 1_000_000)
        assert abs(z.var() - 0.0625) < 0.001


class TestBeta:
    def test_parameter_error(self):
        for a, b in [(0.0, 1.0), (1.0, 0.0), (-1.0, 2.0)]:
            with pytest.raises(ValueError):
                sample_beta(RngStream(0), a, b)

    def test_beta11_is_uniform(self):
        x = sample_beta(RngStream(31), 1.0, 1.0, 100_000)
        _, pvalue = stats.kstest(x, "uniform")
        assert pvalue > 0.001

    def test_mean_2_1(self):
        x = sample_beta(RngStream(32), 2.0, 1.0, 1_000_000)
        assert abs(x.mean() - 2.0 / 3.0) < 0.001

    def test_mean_half_1(self):
        x = sample_beta(RngStream(33), 0.5, 1.0, 1_000_000)
        assert abs(x.mean() - 1.0 / 3.0) < 0.002

    @pytest.mark.parametrize("a", [0.5, 1.0, 2.0, 3.0])
    @pytest.mark.parametrize("b", [0.5, 1.0, 2.0, 3.0])
    def test_moments_on_shape_grid(self, a, b):
        n = 1_000_000
        x = sample_beta(RngStream(1000 + int(10 * a), int(10 * b)), a, b, n)
        mean = a / (a + b)
        var = a * b / ((a + b) ** 2 * (a + b + 1.0))
        # 5 Monte Carlo standard errors
        assert abs(x.mean() - mean) < 5.0 * np.sqrt(var / n)
        mu4 = stats.beta(a, b).moment(4) - 4 * mean * stats.beta(a, b).moment(3) \
            + 6 * mean**2 * stats.beta(a, b).moment(2) - 3 * mean**4
        se_var = np.sqrt((mu4 - var**2) / n)
        assert abs(x.var() - var) < 5.0 * se_var

    def test_open_interval(self):
        x = sample_beta(RngStream(34), 0.5, 0.5, 200_000)
        assert np.all((x > 0.0) & (x < 1.0))


class TestCauchy:
    def test_parameter_error(self):
        with pytest.raises(ValueError):
            sample_cauchy(RngStream(0), 0.0, 0.0)

    def test_median(self):
        x = sample_cauchy(RngStream(41), 0.0, 1.0, 1_000_000)
        assert abs(np.median(x)) < 0.01

    def test_cdf_at_one(self):
        x = sample_cauchy(RngStream(42), 0.0, 1.0, 1_000_000)
        assert abs((x < 1.0).mean() - 0.75) < 0.005

    def test_location_shift(self):
        x = sample_cauchy(RngStream(43), 5.0, 2.0, 1_000_000)
        assert abs(np.median(x) - 5.0) < 0.02
