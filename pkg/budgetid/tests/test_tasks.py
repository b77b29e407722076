"""Tests for tasks.py"""

import numpy as np
import pytest

from budgetid.exceptions import DegenerateInstanceError
from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import NearDegeneracyWarning


def make_task(name):
    from budgetid.tasks import BAI
    from budgetid.tasks import HalfSpace
    from budgetid.tasks import Positivity
    from budgetid.tasks import Thresholding

    return {
        'bai': BAI(),
        'thresholding': Thresholding(0.0),
        'positivity': Positivity(0.0),
        'halfspace': HalfSpace([1.0, -1.0, 0.5], offset=0.1),
    }[name]


class TestBanditInstance:
    @pytest.fixture
    def instance_cls(self):
        from budgetid.tasks import BanditInstance
        return BanditInstance

    def test_default_family_is_unit_gaussian(self, instance_cls, gaussian):
        instance = instance_cls([1.0, 0.0])
        assert instance.family == gaussian
        assert instance.all_gaussian
        np.testing.assert_array_equal(instance.variances, [1.0, 1.0])

    @pytest.mark.parametrize('means', [[1.0], [], [[0.1, 0.2]]])
    def test_needs_at_least_two_arms(self, instance_cls, means):
        with pytest.raises(InvalidParameterError):
            instance_cls(means)

    def test_mean_outside_domain_raises(self, instance_cls, bernoulli):
        with pytest.raises(InvalidParameterError):
            instance_cls([0.5, 1.0], bernoulli)

    def test_family_count_mismatch_raises(self, instance_cls, gaussian):
        with pytest.raises(InvalidParameterError):
            instance_cls([0.5, 0.1], [gaussian] * 3)

    def test_mixed_families(self, instance_cls, gaussian, bernoulli):
        instance = instance_cls([0.5, 0.1], [gaussian, bernoulli])
        assert instance.family is None
        assert not instance.all_gaussian
        with pytest.raises(InvalidParameterError):
            instance.variances  # pylint: disable=pointless-statement

    def test_kl_is_per_arm(self, bernoulli_pair, bernoulli):
        out = bernoulli_pair.kl(bernoulli_pair.means, [0.5, 0.5])
        np.testing.assert_allclose(
            out, [bernoulli.kl(0.6, 0.5), bernoulli.kl(0.4, 0.5)])

    def test_with_means_keeps_families(self, bernoulli_pair):
        other = bernoulli_pair.with_means([0.1, 0.2])
        assert other.families == bernoulli_pair.families
        np.testing.assert_array_equal(other.means, [0.1, 0.2])

    def test_repr(self, gaussian_pair):
        assert repr(gaussian_pair).startswith('BanditInstance(means=[1., 0.]')


class TestAnswers:
    def test_bai(self, bai, gaussian_three):
        assert bai.answer(gaussian_three.means) == 0
        means = np.array([[0.0, 1.0, 0.5], [2.0, 1.0, 0.0]])
        np.testing.assert_array_equal(bai.agrees(means, 0), [False, True])

    def test_thresholding(self):
        from budgetid.tasks import Thresholding

        task = Thresholding(0.5)
        assert task.answer([0.6, 0.3, 0.5]) == ('+', '-', '+')
        means = np.array([[0.6, 0.3], [0.4, 0.3]])
        np.testing.assert_array_equal(
            task.agrees(means, ('+', '-')), [True, False])

    def test_positivity(self):
        from budgetid.tasks import Positivity

        task = Positivity(0.0)
        assert task.answer([1.0, 0.5]) == 'all_above'
        assert task.answer([1.0, -0.5]) == 'exists_below'
        means = np.array([[1.0, 0.5], [1.0, -0.5]])
        np.testing.assert_array_equal(
            task.agrees(means, 'exists_below'), [False, True])

    @pytest.mark.parametrize('task_name', [
        'bai', 'thresholding', 'positivity', 'halfspace'])
    def test_plain_lists_are_accepted(self, task_name):
        task = make_task(task_name)
        means = [0.3, -0.1, 0.7]
        answer = task.answer(means)
        assert answer == task.answer(np.array(means))
        np.testing.assert_array_equal(
            task.agrees([means, means], answer), [True, True])
        assert task.margin(means)[0] > 0
        task.check(means)


    def test_halfspace(self):
        from budgetid.tasks import HalfSpace

        task = HalfSpace([1.0, -1.0], offset=0.5)
        assert task.answer([1.0, 0.0]) == '+'
        assert task.answer([0.0, 0.0]) == '-'
        assert task.signed_margin([1.0, 0.0]) == pytest.approx(0.5)

    def test_halfspace_needs_nonzero_normal(self):
        from budgetid.tasks import HalfSpace

        with pytest.raises(InvalidParameterError):
            HalfSpace([0.0, 0.0])

    def test_halfspace_normalized(self, gaussian_pair):
        from budgetid.tasks import HalfSpace

        task = HalfSpace([2.0, -2.0], offset=1.0).normalized(gaussian_pair)
        np.testing.assert_allclose(task.u_, [0.5, -0.5])
        assert task.offset == pytest.approx(0.25)

    def test_halfspace_normalized_dimension_mismatch(self, gaussian_pair):
        from budgetid.tasks import HalfSpace

        with pytest.raises(InvalidParameterError):
            HalfSpace([1.0, 1.0, 1.0]).normalized(gaussian_pair)


class TestValidation:
    @pytest.fixture
    def validate_instance(self):
        from budgetid.tasks import validate_instance
        return validate_instance

    @pytest.fixture
    def correct_answer(self):
        from budgetid.tasks import correct_answer
        return correct_answer

    def test_valid_instance(self, validate_instance, bai, gaussian_three):
        report = validate_instance(bai, gaussian_three)
        assert report.ok
        assert report
        assert report.margin == pytest.approx(0.5)

    def test_tie_is_degenerate(self, validate_instance, bai):
        from budgetid.tasks import BanditInstance

        report = validate_instance(bai, BanditInstance([1.0, 1.0, 0.0]))
        assert report.degenerate
        assert not report
        assert 'tied' in report.reason

    def test_mean_on_threshold_is_degenerate(
            self, correct_answer, bernoulli):
        from budgetid.tasks import BanditInstance
        from budgetid.tasks import Thresholding

        with pytest.raises(DegenerateInstanceError):
            correct_answer(Thresholding(0.5), BanditInstance([0.5, 0.2],
                                                             bernoulli))

    def test_near_degeneracy_warns(self, validate_instance, bai):
        from budgetid.tasks import BanditInstance

        with pytest.warns(NearDegeneracyWarning):
            report = validate_instance(bai, BanditInstance([1.0, 1.0 - 1e-13]))
        assert report.ok

    def test_correct_answer(self, correct_answer, bai, gaussian_three):
        assert correct_answer(bai, gaussian_three) == 0

    def test_is_alternative(self, bai, gaussian_pair):
        from budgetid.tasks import is_alternative

        assert is_alternative(bai, gaussian_pair, [0.0, 1.0])
        assert not is_alternative(bai, gaussian_pair, [2.0, 1.0])
        with pytest.raises(DegenerateInstanceError):
            is_alternative(bai, gaussian_pair, [0.5, 0.5])

    @pytest.mark.parametrize('task_name, means', [
        ('bai', [0.3, -0.1, 0.7]),
        ('thresholding', [0.3, -0.1, 0.7]),
        ('positivity', [0.3, -0.1, 0.7]),
        ('positivity', [0.3, 0.1, 0.7]),
        ('halfspace', [0.3, -0.1, 0.7]),
    ])
    def test_instance_is_not_its_own_alternative(self, task_name, means):
        from budgetid.tasks import BanditInstance
        from budgetid.tasks import is_alternative

        task = make_task(task_name)
        instance = BanditInstance(means)
        assert not is_alternative(task, instance, means)
        assert not is_alternative(task, instance, instance)

    @pytest.mark.parametrize('perm', [
        (0, 1, 2, 3), (1, 0, 2, 3), (3, 2, 1, 0), (2, 0, 3, 1)])
    def test_bai_answer_follows_permutation(self, correct_answer, bai, perm):
        from budgetid.tasks import BanditInstance

        means = np.array([0.9, 0.1, -0.4, 0.5])
        permuted = BanditInstance(means[list(perm)])
        assert correct_answer(bai, permuted) == list(perm).index(0)
