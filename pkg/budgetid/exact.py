"""Exact error probabilities of two-arm static proportions.

With fixed pull counts the recommendation only depends on the
empirical means, whose distributions are known in closed form. These
oracles serve as references for the Monte Carlo estimates.

"""

import numpy as np
from scipy.stats import binom
from scipy.stats import norm

from budgetid.exceptions import DegenerateInstanceError
from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import UnsupportedError


__all__ = ['bernoulli_two_arm_error', 'gaussian_two_arm_error']


def _check_counts(counts):
    counts = np.asarray(counts)
    if counts.shape != (2,) or np.any(counts < 0) or not np.all(
            counts == np.round(counts)):
        raise InvalidParameterError(
            "Expected two nonnegative integer counts, got {!r}.".format(
                counts.tolist()))
    return counts.astype(np.int64)


def bernoulli_two_arm_error(mu, counts):
    """Probability that two Bernoulli arms pulled ``counts`` times
    recommend the wrong arm.

    Sums over all joint outcomes of ``Binomial(N_1, mu_1)`` and
    ``Binomial(N_2, mu_2)``; ties of the empirical means go to the
    first arm and an unpulled arm has empirical mean 0.

    Parameters
    ----------
    mu : array-like of shape (2,)
      Distinct means in ``(0, 1)``.

    counts : array-like of shape (2,)
      Pull counts ``(N_1, N_2)``.

    Returns
    -------
    p : float

    """
    mu = np.asarray(mu, dtype=float)
    counts = _check_counts(counts)
    if mu.shape != (2,):
        raise UnsupportedError("Exactly two arms are supported.")
    if mu[0] == mu[1]:
        raise DegenerateInstanceError("Both arms have the same mean.")

    outcomes = [np.arange(n + 1) for n in counts]
    pmfs = [binom.pmf(s, n, m) for s, n, m in zip(outcomes, counts, mu)]
    means = [s / max(n, 1) for s, n in zip(outcomes, counts)]

    first_wins = means[0][:, None] >= means[1][None, :]
    wrong = ~first_wins if mu[0] > mu[1] else first_wins
    joint = np.outer(pmfs[0], pmfs[1])
    return float(np.sum(joint[wrong]))


def gaussian_two_arm_error(instance, counts):
    """Probability that two Gaussian arms pulled ``counts`` times
    recommend the wrong arm.

    The difference of the empirical means is Gaussian with mean
    ``mu_1 - mu_2`` and variance ``sigma_1^2 / N_1 + sigma_2^2 / N_2``.

    Parameters
    ----------
    instance : BanditInstance
      Two Gaussian arms with distinct means.

    counts : array-like of shape (2,)
      Positive pull counts.

    """
    counts = _check_counts(counts)
    if instance.n_arms != 2 or not instance.all_gaussian:
        raise UnsupportedError("Exactly two Gaussian arms are supported.")
    if np.any(counts == 0):
        raise InvalidParameterError("Both arms must be pulled.")
    gap = abs(instance.means[0] - instance.means[1])
    if gap == 0:
        raise DegenerateInstanceError("Both arms have the same mean.")
    scale = np.sqrt(np.sum(instance.variances / counts))
    return float(norm.sf(gap / scale))
