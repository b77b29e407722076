"""Tests for algorithms.py"""

import numpy as np
import pytest
from hypothesis import assume
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import InvalidWeightsError
from budgetid.exceptions import TrackingInvariantError
from budgetid.exceptions import UnsupportedError
from budgetid.families import Bernoulli
from budgetid.tasks import BAI
from budgetid.tasks import BanditInstance
from budgetid.tasks import Thresholding


class TestTrack:
    @pytest.fixture
    def track(self):
        from budgetid.algorithms import track
        return track

    @settings(max_examples=200, deadline=None)
    @given(
        weights=st.lists(st.floats(0.0, 1.0), min_size=2, max_size=6),
        T=st.integers(1, 300),
    )
    def test_deviation_at_most_k(self, weights, T):
        from budgetid.algorithms import track

        weights = np.array(weights)
        assume(weights.sum() > 1e-3)
        omega = weights / weights.sum()
        counts, max_deviation = track(omega, T, check=True)
        assert counts.sum() == T
        assert max_deviation <= len(omega)
        assert np.all(counts[0][omega == 0] == 0)

    @pytest.mark.slow
    @pytest.mark.parametrize('K', range(2, 9))
    def test_deviation_at_most_k_long_runs(self, track, K):
        rng = np.random.default_rng(K)
        omegas = rng.dirichlet(np.ones(K), size=143)
        _, max_deviation = track(omegas, 10 ** 5, check=True)
        assert max_deviation <= K

    def test_uniform_is_round_robin(self, track):
        from budgetid.algorithms import TrackingRule

        pulls = TrackingRule([1 / 3, 1 / 3, 1 / 3]).path(7)
        np.testing.assert_array_equal(pulls, [0, 1, 2, 0, 1, 2, 0])
        counts, _ = track([1 / 3, 1 / 3, 1 / 3], 7)
        np.testing.assert_array_equal(counts, [[3, 2, 2]])

    def test_vectorized_over_runs(self, track):
        omegas = np.array([[0.5, 0.5], [0.9, 0.1], [0.2, 0.8]])
        counts, max_deviation = track(omegas, 50)
        np.testing.assert_array_equal(counts, [[25, 25], [45, 5], [10, 40]])
        assert np.isnan(max_deviation)

    def test_path_matches_counts(self):
        from budgetid.algorithms import TrackingRule

        rule = TrackingRule([0.6, 0.3, 0.1])
        pulls = rule.path(137)
        np.testing.assert_array_equal(
            np.bincount(pulls, minlength=3), rule.counts(137))

    def test_counts_are_cached_copies(self):
        from budgetid.algorithms import TrackingRule

        rule = TrackingRule([0.5, 0.5])
        counts = rule.counts(10)
        counts[0] = 99
        np.testing.assert_array_equal(rule.counts(10), [5, 5])

    def test_invariant_error_is_raised(self, track, monkeypatch):
        # a broken argmin drives the counts away from their targets
        monkeypatch.setattr(
            np, 'argmin', lambda a, axis=None: np.zeros(len(a), dtype=int))
        with pytest.raises(TrackingInvariantError):
            track([0.5, 0.5], 10, check=True)


class TestSchedules:
    def test_successive_rejects_regression(self):
        from budgetid.algorithms import successive_rejects_schedule

        increments, remainder = successive_rejects_schedule(3, 300)
        np.testing.assert_array_equal(increments, [75, 37])
        assert remainder == 1

    @pytest.mark.parametrize('K, T', [(2, 10), (3, 300), (5, 101), (10, 1000)])
    def test_successive_rejects_uses_budget(self, K, T):
        from budgetid.algorithms import successive_rejects_schedule

        increments, remainder = successive_rejects_schedule(K, T)
        used = np.sum(increments * (K + 1 - np.arange(1, K)))
        assert remainder >= 0
        assert used + remainder == T
        assert np.all(increments >= 0)

    @pytest.mark.parametrize('K, T', [(3, 3), (3, 2)])
    def test_successive_rejects_needs_more_than_k(self, K, T):
        from budgetid.algorithms import successive_rejects_schedule

        with pytest.raises(UnsupportedError):
            successive_rejects_schedule(K, T)

    def test_one_arm_raises(self):
        from budgetid.algorithms import successive_halving_schedule
        from budgetid.algorithms import successive_rejects_schedule

        with pytest.raises(InvalidParameterError):
            successive_rejects_schedule(1, 10)
        with pytest.raises(InvalidParameterError):
            successive_halving_schedule(1, 10)

    @pytest.mark.parametrize('K, T, expected', [
        (2, 10, [10]),
        (4, 101, [50, 51]),
        (5, 90, [30, 30, 30]),
    ])
    def test_successive_halving(self, K, T, expected):
        from budgetid.algorithms import successive_halving_schedule

        np.testing.assert_array_equal(
            successive_halving_schedule(K, T), expected)

    def test_successive_halving_too_small_budget(self):
        from budgetid.algorithms import successive_halving_schedule

        with pytest.raises(UnsupportedError):
            successive_halving_schedule(4, 7)


class TestStaticProportions:
    @pytest.fixture
    def alg_cls(self):
        from budgetid.algorithms import StaticProportions
        return StaticProportions

    def test_counts_follow_tracking(self, alg_cls, bai, gaussian_three, rng):
        alg = alg_cls([0.5, 0.3, 0.2])
        _, counts = alg.recommend(bai, gaussian_three, 100, rng, 4)
        np.testing.assert_array_equal(counts, [[50, 30, 20]] * 4)

    def test_boundary_weights_raise(self, alg_cls, bai, gaussian_pair):
        with pytest.raises(InvalidWeightsError):
            alg_cls([1.0, 0.0]).check(bai, gaussian_pair, 10)

    def test_budget_below_k_raises(self, alg_cls, bai, gaussian_three):
        with pytest.raises(InvalidParameterError):
            alg_cls([0.5, 0.3, 0.2]).check(bai, gaussian_three, 2)

    def test_error_rate_matches_gaussian_exact(self, bai, gaussian_pair):
        from budgetid.algorithms import Uniform
        from budgetid.exact import gaussian_two_arm_error

        rng = np.random.default_rng(1)
        errors = Uniform().errors(bai, gaussian_pair, 8, rng, 20000)
        expected = gaussian_two_arm_error(gaussian_pair, [4, 4])
        assert errors.mean() == pytest.approx(expected, abs=0.01)

    def test_error_rate_matches_bernoulli_exact(self, bai, bernoulli_pair):
        from budgetid.algorithms import Uniform
        from budgetid.exact import bernoulli_two_arm_error

        rng = np.random.default_rng(2)
        errors = Uniform().errors(bai, bernoulli_pair, 20, rng, 20000)
        expected = bernoulli_two_arm_error(bernoulli_pair.means, [10, 10])
        assert errors.mean() == pytest.approx(expected, abs=0.01)

    def test_thresholding_answers(self, alg_cls, bernoulli, rng):
        task = Thresholding(0.5)
        instance = BanditInstance([0.95, 0.05], bernoulli)
        answers, _ = alg_cls([0.5, 0.5]).recommend(task, instance, 200, rng, 5)
        assert answers == [('+', '-')] * 5

    def test_uniform_weights(self, gaussian_three):
        from budgetid.algorithms import Uniform

        np.testing.assert_allclose(
            Uniform().weights(gaussian_three), [1 / 3] * 3)

    def test_get_params(self):
        from budgetid.algorithms import Uniform

        assert Uniform().get_params() == {'check_tracking': False}


class TestElimination:
    @pytest.fixture(params=['SuccessiveRejects', 'SuccessiveHalving'])
    def alg(self, request):
        import budgetid.algorithms
        return getattr(budgetid.algorithms, request.param)()

    def test_counts_sum_to_budget(self, alg, bai, rng):
        instance = BanditInstance([0.5, 0.4, 0.3, 0.2, 0.1], Bernoulli())
        _, counts = alg.recommend(bai, instance, 203, rng, 50)
        np.testing.assert_array_equal(counts.sum(axis=1), 203)

    def test_easy_instance_is_solved(self, alg, bai, rng):
        instance = BanditInstance([5.0, 0.0, -1.0, -2.0])
        winners, _ = alg.recommend(bai, instance, 200, rng, 100)
        np.testing.assert_array_equal(winners, 0)
        assert not np.any(alg.errors(bai, instance, 200, rng, 100))

    def test_only_bai_is_supported(self, alg, gaussian_pair):
        with pytest.raises(UnsupportedError):
            alg.check(Thresholding(0.5), gaussian_pair, 100)

    def test_run_once(self, alg, bai, gaussian_three):
        from budgetid.algorithms import run_once

        answer, counts = run_once(alg, bai, gaussian_three, 60, 0)
        assert isinstance(answer, int)
        assert counts.shape == (3,)
        assert counts.sum() == 60

    def test_run_once_is_reproducible(self, alg, bai, gaussian_three):
        from budgetid.algorithms import run_once

        first = run_once(alg, bai, gaussian_three, 60, 7)
        second = run_once(alg, bai, gaussian_three, 60, 7)
        assert first[0] == second[0]
        np.testing.assert_array_equal(first[1], second[1])


class TestSuccessiveRejects:
    def test_two_arm_counts(self, bai, gaussian_pair, rng):
        from budgetid.algorithms import SuccessiveRejects

        _, counts = SuccessiveRejects().recommend(
            bai, gaussian_pair, 10, rng, 3)
        np.testing.assert_array_equal(counts, [[5, 5]] * 3)

    def test_three_arm_counts(self, bai, rng):
        from budgetid.algorithms import SuccessiveRejects

        instance = BanditInstance([10.0, 0.0, -10.0])
        _, counts = SuccessiveRejects().recommend(bai, instance, 300, rng, 2)
        # arm 2 drops after 75 pulls; the others get 37 more and the
        # remaining pull goes to the lower index
        np.testing.assert_array_equal(counts, [[113, 112, 75]] * 2)


class TestSuccessiveHalving:
    def test_round_counts(self, bai, rng):
        from budgetid.algorithms import SuccessiveHalving

        instance = BanditInstance([10.0, 0.0, -10.0, -20.0])
        _, counts = SuccessiveHalving().recommend(bai, instance, 101, rng, 2)
        # round one: 50 pulls as 13, 13, 12, 12; round two: 51 as 26, 25
        np.testing.assert_array_equal(counts, [[39, 38, 12, 12]] * 2)
