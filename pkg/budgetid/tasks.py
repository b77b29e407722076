"""Identification tasks and bandit instances.

A task defines the correct answer ``i*(mu)`` of a mean vector and
therefore the alternative set ``Alt(mu)``, the means whose answer
differs. Answers are

* BAI: the 0-based index of the best arm;
* thresholding: a tuple of ``'+'``/``'-'``, one per arm;
* positivity: ``'all_above'`` or ``'exists_below'``;
* half-space: ``'+'`` or ``'-'``, the side of the hyperplane.

Outside of the valid instances (e.g. for empirical means) answers are
extended deterministically: ties go to the lowest index and a mean
exactly on the threshold or hyperplane counts as above.

"""

import warnings

import numpy as np
from sklearn.base import BaseEstimator

from budgetid.exceptions import DegenerateInstanceError
from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import NearDegeneracyWarning
from budgetid.families import ExponentialFamily
from budgetid.families import Gaussian


__all__ = [
    'BAI',
    'BanditInstance',
    'DegeneracyReport',
    'HalfSpace',
    'Positivity',
    'Thresholding',
    'correct_answer',
    'is_alternative',
    'validate_instance',
]

NEAR_DEGENERACY_MARGIN = 1e-12


class BanditInstance:
    """A tuple of arm distributions, one exponential family and one
    mean per arm.

    Parameters
    ----------
    means : array-like of shape (K,)
      The mean of each arm, inside the mean domain of its family.

    families : ExponentialFamily or list of ExponentialFamily (default=None)
      One family shared by all arms or one family per arm. Defaults
      to unit-variance Gaussians.

    """
    def __init__(self, means, families=None):
        means = np.array(means, dtype=float)
        if means.ndim != 1 or len(means) < 2:
            raise InvalidParameterError(
                "An instance needs a 1d vector of at least 2 means, got "
                "shape {}.".format(means.shape))
        if families is None:
            families = Gaussian()
        if isinstance(families, ExponentialFamily):
            families = [families] * len(means)
        families = tuple(families)
        if len(families) != len(means):
            raise InvalidParameterError(
                "Got {} families for {} means.".format(
                    len(families), len(means)))
        for family, mean in zip(families, means):
            family.check_mean(mean)

        self.means = means
        self.families = families

    @property
    def n_arms(self):
        return len(self.means)

    @property
    def family(self):
        """The common family of all arms, or None if they differ."""
        first = self.families[0]
        if all(family == first for family in self.families[1:]):
            return first
        return None

    @property
    def all_gaussian(self):
        return all(isinstance(f, Gaussian) for f in self.families)

    @property
    def variances(self):
        """Per-arm variances; only defined for Gaussian arms."""
        if not self.all_gaussian:
            raise InvalidParameterError(
                "Variances are only defined for Gaussian instances.")
        return np.array([f.variance for f in self.families])

    def kl(self, x, y):
        """Per-arm divergences ``KL(x_k, y_k)`` as a vector."""
        return np.array([
            family.kl(xk, yk) for family, xk, yk in zip(self.families, x, y)])

    def with_means(self, means):
        """A new instance with the same families and other means."""
        return BanditInstance(means, self.families)

    def permuted(self, perm):
        return BanditInstance(
            self.means[perm], [self.families[i] for i in perm])

    def __len__(self):
        return self.n_arms

    def __repr__(self):
        family = self.family
        fams = repr(family) if family is not None else repr(list(self.families))
        return 'BanditInstance(means={}, families={})'.format(
            np.array2string(self.means, separator=', '), fams)


class DegeneracyReport:
    """Outcome of :func:`validate_instance`.

    Attributes
    ----------
    degenerate : bool
      Whether the instance lies on the boundary of the answer sets.

    margin : float
      Distance to degeneracy (0 for degenerate instances).

    reason : str
      Human readable explanation.

    """
    def __init__(self, degenerate, margin, reason=''):
        self.degenerate = degenerate
        self.margin = margin
        self.reason = reason

    @property
    def ok(self):
        return not self.degenerate

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return 'DegeneracyReport(degenerate={}, margin={!r}, reason={!r})'.format(
            self.degenerate, self.margin, self.reason)


class Task(BaseEstimator):
    """Base class of identification tasks."""

    def answer(self, means):
        """Answer of a mean vector, extended to degenerate vectors."""
        raise NotImplementedError

    def agrees(self, means, answer):
        """Boolean vector telling which rows of ``means`` (shape
        (B, K)) have the given answer under the extended rule.

        """
        raise NotImplementedError

    def margin(self, means):
        """Distance of a mean vector to the boundary of its answer set
        and the name of the closest degeneracy.

        """
        raise NotImplementedError

    def check(self, means):
        """Raise a :class:`DegenerateInstanceError` if ``means`` has no
        unique answer.

        """
        margin, reason = self.margin(np.asarray(means, dtype=float))
        if not margin > 0:
            raise DegenerateInstanceError(
                "Degenerate means {!r} for {!r}: {}.".format(
                    np.asarray(means).tolist(), self, reason))


class BAI(Task):
    """Best arm identification: the answer is the arm with the largest
    mean.

    """
    def answer(self, means):
        return int(np.argmax(means))

    def agrees(self, means, answer):
        means = np.asarray(means, dtype=float)
        return np.argmax(means, axis=1) == answer

    def margin(self, means):
        means = np.asarray(means, dtype=float)
        top = np.sort(means)[::-1]
        return float(top[0] - top[1]), 'tied largest means'


class Thresholding(Task):
    """Find which arms have a mean above the threshold ``theta``.

    Parameters
    ----------
    theta : float (default=0.0)
      The threshold.

    """
    def __init__(self, theta=0.0):
        self.theta = theta

    def answer(self, means):
        return tuple('+' if m >= self.theta else '-' for m in means)

    def agrees(self, means, answer):
        means = np.asarray(means, dtype=float)
        above = np.array([a == '+' for a in answer])
        return np.all((means >= self.theta) == above, axis=1)

    def margin(self, means):
        means = np.asarray(means, dtype=float)
        return float(np.min(np.abs(means - self.theta))), 'mean equal to theta'


class Positivity(Task):
    """Decide whether all arms have a mean above ``theta`` or at least
    one is below.

    Parameters
    ----------
    theta : float (default=0.0)
      The threshold.

    """
    def __init__(self, theta=0.0):
        self.theta = theta

    def answer(self, means):
        means = np.asarray(means, dtype=float)
        return 'all_above' if np.all(means >= self.theta) else 'exists_below'

    def agrees(self, means, answer):
        means = np.asarray(means, dtype=float)
        all_above = np.all(means >= self.theta, axis=1)
        return all_above == (answer == 'all_above')

    def margin(self, means):
        means = np.asarray(means, dtype=float)
        return float(np.min(np.abs(means - self.theta))), 'mean equal to theta'


class HalfSpace(Task):
    """Decide on which side of the hyperplane ``{x : u'x = offset}``
    the mean vector lies (Gaussian arms only).

    Parameters
    ----------
    u : array-like of shape (K,)
      Normal vector of the hyperplane, nonzero.

    offset : float (default=0.0)
      The hyperplane passes through any ``eta`` with
      ``u'eta = offset``.

    """
    def __init__(self, u, offset=0.0):
        u_arr = np.asarray(u, dtype=float)
        if u_arr.ndim != 1 or not np.any(u_arr != 0):
            raise InvalidParameterError(
                "The normal vector u must be a nonzero vector.")
        self.u = u
        self.offset = offset

    @property
    def u_(self):
        return np.asarray(self.u, dtype=float)

    def normalized(self, instance):
        """The same hyperplane with ``sum_k |u_k| sigma_k = 1`` for the
        Gaussian arms of ``instance``.

        """
        u = self.u_
        if len(u) != instance.n_arms:
            raise InvalidParameterError(
                "u has {} coordinates for {} arms.".format(
                    len(u), instance.n_arms))
        scale = np.sum(np.abs(u) * np.sqrt(instance.variances))
        return HalfSpace(u / scale, self.offset / scale)

    def signed_margin(self, means):
        return np.asarray(means, dtype=float) @ self.u_ - self.offset

    def answer(self, means):
        return '+' if self.signed_margin(means) >= 0 else '-'

    def agrees(self, means, answer):
        return (self.signed_margin(means) >= 0) == (answer == '+')

    def margin(self, means):
        return float(abs(self.signed_margin(means))), 'mean on the hyperplane'


def validate_instance(task, instance):
    """Check that ``instance`` has a unique correct answer.

    Exact degeneracy (a tie for BAI, a mean equal to the threshold, a
    mean vector on the hyperplane) is reported as degenerate. Legal
    instances closer than ``1e-12`` to degeneracy trigger a
    :class:`NearDegeneracyWarning`.

    Returns
    -------
    report : DegeneracyReport

    """
    margin, reason = task.margin(instance.means)
    if not margin > 0:
        return DegeneracyReport(True, 0.0, reason)
    if margin < NEAR_DEGENERACY_MARGIN:
        warnings.warn(
            "Instance {!r} is within {:.3g} of degeneracy ({}).".format(
                instance, margin, reason), NearDegeneracyWarning)
    return DegeneracyReport(False, margin)


def correct_answer(task, instance):
    """The correct answer ``i*(mu)`` of a valid instance.

    Raises
    ------
    DegenerateInstanceError
      If the instance is degenerate for ``task``.

    """
    report = validate_instance(task, instance)
    if report.degenerate:
        raise DegenerateInstanceError(
            "Degenerate instance {!r} for {!r}: {}.".format(
                instance, task, report.reason))
    return task.answer(instance.means)


def is_alternative(task, instance, candidate):
    """Whether the mean vector ``candidate`` has a different correct
    answer than ``instance``.

    Parameters
    ----------
    task : Task

    instance : BanditInstance

    candidate : array-like or BanditInstance
      The candidate alternative; it must not be degenerate.

    """
    lam = getattr(candidate, 'means', candidate)
    lam = np.asarray(lam, dtype=float)
    task.check(lam)
    return task.answer(lam) != correct_answer(task, instance)
