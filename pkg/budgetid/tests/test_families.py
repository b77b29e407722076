"""Tests for families.py"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st
from mpmath import mp
from scipy.stats import entropy

from budgetid.exceptions import InvalidParameterError


class TestGaussian:
    @pytest.fixture
    def family_cls(self):
        from budgetid.families import Gaussian
        return Gaussian

    def test_kl_closed_form(self, family_cls):
        family = family_cls(2.0)
        assert family.kl(1.0, 0.0) == pytest.approx(0.25)
        assert family.kl(3.0, 3.0) == 0.0

    def test_kl_is_bregman_of_natural_parameters(self, family_cls):
        family = family_cls(0.5)
        x, y = 0.3, -1.2
        xi_x = family.natural_of_mean(x)
        xi_y = family.natural_of_mean(y)
        assert family.kl(x, y) == pytest.approx(family.bregman(xi_y, xi_x))

    def test_mean_natural_round_trip(self, family_cls):
        family = family_cls(3.0)
        x = np.linspace(-5, 5, 11)
        np.testing.assert_allclose(
            family.mean_of_natural(family.natural_of_mean(x)), x)

    @pytest.mark.parametrize('variance', [0, -1.0, np.inf, np.nan])
    def test_invalid_variance_raises(self, family_cls, variance):
        with pytest.raises(InvalidParameterError):
            family_cls(variance)

    def test_sample_sum_distribution(self, family_cls, rng):
        family = family_cls(4.0)
        sums = family.sample_sum(0.5, np.full(20000, 25), rng)
        # sum of 25 draws: mean 12.5, variance 100
        assert sums.mean() == pytest.approx(12.5, abs=0.3)
        assert sums.var() == pytest.approx(100, rel=0.05)

    def test_sample_sum_of_zero_pulls_is_zero(self, family_cls, rng):
        sums = family_cls().sample_sum(1.0, np.zeros(5, dtype=int), rng)
        np.testing.assert_array_equal(sums, 0.0)

    def test_equality_and_hash(self, family_cls):
        assert family_cls(1.0) == family_cls(1.0)
        assert family_cls(1.0) != family_cls(2.0)
        assert len({family_cls(1.0), family_cls(1.0)}) == 1


class TestBernoulli:
    @pytest.fixture
    def family(self):
        from budgetid.families import Bernoulli
        return Bernoulli()

    @pytest.mark.parametrize('x, y', [
        (0.6, 0.4),
        (0.5, 0.01),
        (1e-3, 0.9),
    ])
    def test_kl_matches_entropy(self, family, x, y):
        expected = entropy([x, 1 - x], [y, 1 - y])
        assert family.kl(x, y) == pytest.approx(expected, rel=1e-10)

    def test_kl_first_argument_on_closed_boundary(self, family):
        assert family.kl(0.0, 0.5) == pytest.approx(np.log(2))
        assert family.kl(1.0, 0.5) == pytest.approx(np.log(2))

    def test_kl_tiny_means_are_accurate(self, family):
        y = 1e-12
        x = y * (1 + 1e-6)
        with mp.workdps(50):
            xm, ym = mp.mpf(x), mp.mpf(y)
            expected = float(
                xm * mp.log(xm / ym)
                + (1 - xm) * (mp.log1p(-xm) - mp.log1p(-ym)))
        assert family.kl(x, y) == pytest.approx(expected, rel=1e-6)

    def test_kl_means_near_one_are_accurate(self, family):
        x, y = 1 - 2e-13, 1 - 1e-13
        with mp.workdps(50):
            xm, ym = mp.mpf(x), mp.mpf(y)
            expected = float(
                xm * mp.log(xm / ym) + (1 - xm) * mp.log((1 - xm) / (1 - ym)))
        assert family.kl(x, y) == pytest.approx(expected, rel=1e-6)

    def test_kl_vectorized(self, family):
        x = np.array([0.2, 0.5, 0.8])
        out = family.kl(x, 0.5)
        assert out.shape == (3,)
        assert out[1] == 0.0
        assert out[0] == pytest.approx(out[2])

    @pytest.mark.parametrize('mean', [0.0, 1.0, -0.1, 1.5, np.nan])
    def test_natural_of_mean_outside_domain_raises(self, family, mean):
        with pytest.raises(InvalidParameterError):
            family.natural_of_mean(mean)

    def test_second_kl_argument_must_be_interior(self, family):
        with pytest.raises(InvalidParameterError):
            family.kl(0.5, 0.0)

    def test_phi_prime_is_mean(self, family):
        xi = family.natural_of_mean(0.3)
        assert family.phi_prime(xi) == pytest.approx(0.3)
        assert family.phi_prime_inv(0.3) == pytest.approx(xi)

    def test_sample_sum_is_binomial(self, family, rng):
        sums = family.sample_sum(0.3, np.full(20000, 10), rng)
        assert sums.min() >= 0
        assert sums.max() <= 10
        assert sums.mean() == pytest.approx(3.0, abs=0.05)


class TestModuleFunctions:
    def test_functions_dispatch_to_family(self, gaussian, bernoulli):
        from budgetid.families import kl
        from budgetid.families import phi

        assert kl(gaussian, 1.0, 0.0) == gaussian.kl(1.0, 0.0)
        assert kl(bernoulli, 0.6, 0.4) == bernoulli.kl(0.6, 0.4)
        assert phi(bernoulli, 0.0) == pytest.approx(np.log(2))


def family_of(name, variance=1.0):
    from budgetid.families import Bernoulli
    from budgetid.families import Gaussian

    return Bernoulli() if name == 'bernoulli' else Gaussian(variance)


means_01 = st.floats(0.01, 0.99)
gaussian_means = st.floats(-10.0, 10.0)
variances = st.floats(0.1, 10.0)


class TestSample:
    @settings(max_examples=50, deadline=None)
    @given(mean=st.floats(1e-12, 1 - 1e-12), seed=st.integers(0, 2 ** 32))
    def test_bernoulli_draws_are_binary(self, mean, seed):
        from budgetid.families import sample

        rng = np.random.default_rng(seed)
        draws = sample(family_of('bernoulli'), mean, rng, size=500)
        assert draws.shape == (500,)
        assert set(np.unique(draws)) <= {0, 1}

    @pytest.mark.parametrize('mean, expected', [(1e-12, 0), (1 - 1e-12, 1)])
    def test_near_degenerate_bernoulli(self, rng, mean, expected):
        from budgetid.families import sample

        draws = sample(family_of('bernoulli'), mean, rng, size=10000)
        np.testing.assert_array_equal(draws, expected)

    def test_scalar_draw(self, rng):
        from budgetid.families import sample

        assert sample(family_of('bernoulli'), 0.5, rng) in (0, 1)
        assert np.ndim(sample(family_of('gaussian'), 0.5, rng)) == 0

    @settings(max_examples=30, deadline=None)
    @given(mean=gaussian_means, variance=variances,
           seed=st.integers(0, 2 ** 32))
    def test_gaussian_empirical_mean_is_normal(self, mean, variance, seed):
        from budgetid.families import sample

        n = 20000
        rng = np.random.default_rng(seed)
        draws = sample(family_of('gaussian', variance), mean, rng, size=n)
        z = (draws.mean() - mean) / np.sqrt(variance / n)
        assert abs(z) < 6
        assert draws.var() == pytest.approx(variance, rel=0.1)

    @settings(max_examples=30, deadline=None)
    @given(name=st.sampled_from(['gaussian', 'bernoulli']), mean=means_01,
           seed=st.integers(0, 2 ** 32))
    def test_fixed_generator_is_deterministic(self, name, mean, seed):
        from budgetid.families import sample

        family = family_of(name)
        first = sample(family, mean, np.random.default_rng(seed), size=64)
        second = sample(family, mean, np.random.default_rng(seed), size=64)
        np.testing.assert_array_equal(first, second)


class TestDivergenceProperties:
    @settings(max_examples=100, deadline=None)
    @given(x=means_01, y=means_01)
    def test_bernoulli_kl_is_bregman(self, x, y):
        from budgetid.families import bregman
        from budgetid.families import kl
        from budgetid.families import natural_of_mean

        family = family_of('bernoulli')
        expected = bregman(family, natural_of_mean(family, y),
                           natural_of_mean(family, x))
        assert kl(family, x, y) == pytest.approx(
            float(expected), rel=1e-10, abs=1e-13)

    @settings(max_examples=100, deadline=None)
    @given(x=gaussian_means, y=gaussian_means, variance=variances)
    def test_gaussian_kl_is_bregman(self, x, y, variance):
        from budgetid.families import bregman
        from budgetid.families import kl
        from budgetid.families import natural_of_mean

        family = family_of('gaussian', variance)
        expected = bregman(family, natural_of_mean(family, y),
                           natural_of_mean(family, x))
        assert kl(family, x, y) == pytest.approx(
            float(expected), rel=1e-10, abs=1e-13)

    @settings(max_examples=100, deadline=None)
    @given(x=st.floats(0.02, 0.98), y=means_01)
    def test_bernoulli_kl_strictly_convex_in_first_mean(self, x, y):
        from budgetid.families import kl

        family, h = family_of('bernoulli'), 1e-3
        second_difference = (
            kl(family, x - h, y) + kl(family, x + h, y) - 2 * kl(family, x, y))
        # the second derivative is 1 / (x (1 - x)) >= 4
        assert second_difference >= 3.9 * h ** 2

    @settings(max_examples=100, deadline=None)
    @given(x=gaussian_means, y=gaussian_means, variance=variances)
    def test_gaussian_kl_strictly_convex_in_first_mean(self, x, y, variance):
        from budgetid.families import kl

        family, h = family_of('gaussian', variance), 1e-2
        second_difference = (
            kl(family, x - h, y) + kl(family, x + h, y) - 2 * kl(family, x, y))
        assert second_difference == pytest.approx(h ** 2 / variance, rel=1e-3)

    def test_bernoulli_mean_map_round_trip(self):
        from budgetid.families import phi_prime
        from budgetid.families import phi_prime_inv

        family = family_of('bernoulli')
        xi = np.linspace(-5.0, 5.0, 201)
        np.testing.assert_allclose(
            phi_prime_inv(family, phi_prime(family, xi)), xi,
            rtol=0, atol=1e-12)
