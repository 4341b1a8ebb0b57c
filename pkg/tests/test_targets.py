"""Built-in target densities: frozen values, gradients, normalization, tails."""

import math

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import quad

from randive.targets import (
    bimodal_example1,
    needle_example2,
    thick_tailed,
    thick_tailed_cdf,
)

from .conftest import central_difference


def _density(target):
    return lambda x: math.exp(target.log_density(x))


class TestBimodal:
    def test_mode_symmetry(self):
        t = bimodal_example1()
        assert t.log_density(0.0) == t.log_density(10.0)

    def test_valley_depth(self):
        # between-modes value: both components sit 50 log-units below a peak,
        # so density(5)/density(0) = 2 exp(-50) / (1 + exp(-200))
        t = bimodal_example1()
        expected = math.log(2.0) - 50.0 - math.log1p(math.exp(-200.0))
        assert t.log_density(5.0) - t.log_density(0.0) == pytest.approx(expected, abs=1e-12)

    def test_matches_direct_mixture(self):
        t = bimodal_example1()
        for x in (-1.0, 0.3, 4.2, 9.7, 12.0):
            direct = 0.5 * stats.norm.pdf(x, 0.0, 0.5) + 0.5 * stats.norm.pdf(x, 10.0, 0.5)
            assert _density(t)(x) == pytest.approx(direct, rel=1e-12)

    def test_gradient_matches_finite_difference(self):
        t = bimodal_example1()
        rng = np.random.default_rng(0)
        for x in rng.uniform(-2.0, 12.0, 25):
            fd = central_difference(t.log_density, float(x))
            assert t.grad_log_density(float(x)) == pytest.approx(fd, rel=1e-5, abs=1e-5)

    def test_tail_ratio_vanishes(self):
        # polynomial-tail limit with p = infinity: pi(x)/pi(x*eps) -> 0
        t = bimodal_example1()
        ratio = math.exp(t.log_density(100.0) - t.log_density(50.0))
        assert ratio < 1e-6

    def test_normalized(self):
        t = bimodal_example1()
        total, _ = quad(_density(t), -50.0, 60.0, points=[0.0, 10.0], limit=200)
        assert total == pytest.approx(1.0, abs=1e-8)


class TestNeedle:
    def test_needle_mass_is_half(self):
        t = needle_example2()
        inner, _ = quad(_density(t), -0.05, 0.05, points=[0.0], limit=200)
        total, _ = quad(_density(t), -30.0, 30.0, points=[0.0, 5.0], limit=400)
        assert total == pytest.approx(1.0, abs=1e-7)
        assert inner / total == pytest.approx(0.5, abs=1e-6)

    def test_needle_mass_against_normal_cdf(self):
        lo, hi = -0.05, 0.05
        direct = 0.5 * (stats.norm.cdf(hi, 0.0, 0.01) - stats.norm.cdf(lo, 0.0, 0.01)) + 0.5 * (
            stats.norm.cdf(hi, 5.0, 1.0) - stats.norm.cdf(lo, 5.0, 1.0)
        )
        assert direct == pytest.approx(0.5, abs=1e-6)

    def test_peak_ordering(self):
        t = needle_example2()
        assert t.log_density(0.0) > t.log_density(5.0)

    def test_positive_between_modes(self):
        t = needle_example2()
        assert math.isfinite(t.log_density(2.5))

    def test_no_linear_space_underflow(self):
        # the needle contribution at x = 1 is exp(-5000)-ish; log space must
        # still return the haystack value, not -inf
        t = needle_example2()
        assert t.log_density(1.0) == pytest.approx(
            math.log(0.5 * stats.norm.pdf(1.0, 5.0, 1.0)), rel=1e-9
        )

    def test_gradient_matches_finite_difference(self):
        t = needle_example2()
        for x in (0.004, 2.0, 5.5, -1.0):
            fd = central_difference(t.log_density, x, h=1e-7)
            assert t.grad_log_density(x) == pytest.approx(fd, rel=1e-4)


class TestThickTailed:
    def test_frozen_values(self):
        t = thick_tailed()
        assert _density(t)(0.0) == pytest.approx(2.0 / math.pi, rel=1e-14)
        assert _density(t)(1.0) == pytest.approx(0.5 / math.pi, rel=1e-14)

    def test_gradient(self):
        t = thick_tailed()
        for x in (-3.0, -0.5, 0.0, 0.7, 10.0):
            fd = central_difference(t.log_density, x)
            assert t.grad_log_density(x) == pytest.approx(fd, rel=1e-6, abs=1e-6)

    def test_normalized_and_second_moment(self):
        t = thick_tailed()
        total = quad(_density(t), -np.inf, np.inf, points=None)[0]
        assert total == pytest.approx(1.0, abs=1e-6)
        second = quad(lambda x: x * x * _density(t)(x), -np.inf, np.inf)[0]
        assert second == pytest.approx(1.0, abs=1e-6)

    def test_tail_exponent(self):
        t = thick_tailed()
        assert t.tail_exponent_p == 4.0
        for eps in (0.3, -0.3, 0.7, -0.7):
            for x in (1e4, -1e4):
                ratio = math.exp(t.log_density(x) - t.log_density(x * eps))
                assert ratio == pytest.approx(abs(eps) ** 4, rel=0.01)

    def test_nonfinite_states_have_zero_density(self):
        t = thick_tailed()
        assert t.log_density(math.inf) == -math.inf
        assert t.log_density(-math.inf) == -math.inf
        assert t.log_density(math.nan) == -math.inf


class TestThickTailedCdf:
    def test_frozen_values(self):
        assert thick_tailed_cdf(0.0) == 0.5
        assert thick_tailed_cdf(1.0) == pytest.approx(0.75 + 1.0 / (2.0 * math.pi), rel=1e-14)
        assert thick_tailed_cdf(-1.0) == pytest.approx(1.0 - thick_tailed_cdf(1.0), abs=1e-15)

    def test_limits_and_monotonicity(self):
        xs = np.linspace(-300.0, 300.0, 4001)
        vals = np.array([thick_tailed_cdf(x) for x in xs])
        assert np.all(np.diff(vals) >= 0.0)
        assert thick_tailed_cdf(-1e12) == pytest.approx(0.0, abs=1e-10)
        assert thick_tailed_cdf(1e12) == pytest.approx(1.0, abs=1e-10)

    def test_antiderivative_of_density(self):
        t = thick_tailed()
        rng = np.random.default_rng(7)
        for _ in range(20):
            a, b = np.sort(rng.uniform(-20.0, 20.0, 2))
            mass = quad(_density(t), a, b, limit=200)[0]
            assert thick_tailed_cdf(b) - thick_tailed_cdf(a) == pytest.approx(mass, abs=1e-8)
