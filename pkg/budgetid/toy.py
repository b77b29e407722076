"""Contains toy instances for quick prototyping and testing."""

import numpy as np

from budgetid.exceptions import InvalidParameterError
from budgetid.families import Bernoulli
from budgetid.families import Gaussian
from budgetid.tasks import BanditInstance


__all__ = [
    'make_bai_instance',
    'make_threshold_instance',
    'make_two_arm_grid',
    'random_instance',
]


def make_bai_instance(K, gap=1.0, best=0.0, family=None):
    """Instance with one best arm of mean ``best`` and ``K - 1`` arms at
    ``best - k gap`` for ``k = 1..K-1``.

    """
    family = family or Gaussian()
    means = best - gap * np.arange(K, dtype=float)
    return BanditInstance(means, family)


def make_threshold_instance(K, theta=0.0, spread=1.0, family=None):
    """Instance whose means alternate above and below ``theta``, at
    distances ``spread / 2, spread, 3 spread / 2, ...``.

    """
    family = family or Gaussian()
    distance = spread * np.arange(1, K + 1) / 2
    sign = np.where(np.arange(K) % 2 == 0, 1.0, -1.0)
    return BanditInstance(theta + sign * distance, family)


def _default_range(family):
    if isinstance(family, Bernoulli):
        return 0.05, 0.95
    return -1.0, 1.0


def random_instance(rng, family=None, K=2, low=None, high=None, min_gap=1e-3,
                    max_tries=1000):
    """Draw an instance with means uniform in ``[low, high]`` whose
    pairwise distances are all at least ``min_gap``.

    Parameters
    ----------
    rng : np.random.Generator or int
      Source of randomness; an int seeds a fresh generator.

    family : ExponentialFamily (default=Gaussian())

    K : int (default=2)
      Number of arms.

    low, high : float or None (default=None)
      Range of the means; defaults to ``[0.05, 0.95]`` for Bernoulli
      arms and ``[-1, 1]`` otherwise.

    min_gap : float (default=1e-3)
      Minimum distance between two means.

    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    family = family or Gaussian()
    default_low, default_high = _default_range(family)
    low = default_low if low is None else low
    high = default_high if high is None else high

    for _ in range(max_tries):
        means = rng.uniform(low, high, size=K)
        if np.min(np.diff(np.sort(means))) >= min_gap:
            return BanditInstance(means, family)
    raise InvalidParameterError(
        "Could not draw {} means in [{}, {}] that are {} apart.".format(
            K, low, high, min_gap))


def make_two_arm_grid(low, high, n, family=None, off_diagonal=True):
    """All two-arm instances ``(a, b)`` with ``a`` and ``b`` on an
    ``n``-point grid of ``[low, high]``; the diagonal ``a = b`` is
    skipped if ``off_diagonal``.

    """
    family = family or Bernoulli()
    points = np.linspace(low, high, n)
    return [
        BanditInstance([a, b], family)
        for a in points for b in points
        if not (off_diagonal and a == b)
    ]
