"""One-parameter canonical exponential families.

A family is described by its log-partition function ``phi`` of the
natural parameter ``xi``. The mean is ``phi_prime(xi)`` and the
divergence between the distributions with means ``x`` and ``y`` is
``kl(x, y) = bregman(xi(y), xi(x))``.

"""

import numpy as np
from scipy.special import expit
from scipy.special import logit
from sklearn.base import BaseEstimator

from budgetid.exceptions import InvalidParameterError


__all__ = [
    'Bernoulli',
    'ExponentialFamily',
    'Gaussian',
    'bregman',
    'kl',
    'mean_of_natural',
    'natural_of_mean',
    'phi',
    'phi_prime',
    'phi_prime_inv',
    'sample',
    'sample_sum',
]


class ExponentialFamily(BaseEstimator):
    """Base class of the supported families.

    Subclasses define ``mean_domain`` (an open interval) and the
    parametrization maps. All methods accept scalars or numpy arrays.

    """
    name = None
    mean_domain = (-np.inf, np.inf)

    def check_mean(self, x, closed=False):
        """Raise an :class:`InvalidParameterError` if a mean is outside
        of the (closure of the) mean domain.

        """
        x = np.asarray(x, dtype=float)
        low, high = self.mean_domain
        if closed:
            bad = np.isnan(x) | (x < low) | (x > high)
        else:
            bad = np.isnan(x) | (x <= low) | (x >= high)
        if np.any(bad):
            kind = 'closure of the mean domain' if closed else 'mean domain'
            raise InvalidParameterError(
                "Mean(s) {!r} outside of the {} {} of {!r}.".format(
                    np.atleast_1d(x)[np.atleast_1d(bad)].tolist(), kind,
                    self.mean_domain, self))
        return x

    def natural_of_mean(self, x):
        raise NotImplementedError

    def mean_of_natural(self, xi):
        return self.phi_prime(xi)

    def phi(self, xi):
        raise NotImplementedError

    def phi_prime(self, xi):
        raise NotImplementedError

    def phi_prime_inv(self, x):
        return self.natural_of_mean(x)

    def bregman(self, a, b):
        """Bregman divergence ``phi(a) - phi(b) - (a - b) phi'(b)``."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        d = self.phi(a) - self.phi(b) - (a - b) * self.phi_prime(b)
        return np.maximum(d, 0.0)

    def kl(self, x, y):
        raise NotImplementedError

    def sample(self, mean, rng, size=None):
        raise NotImplementedError

    def sample_sum(self, mean, n, rng):
        raise NotImplementedError

    def scale(self, mean):
        """Standard deviation of one observation."""
        raise NotImplementedError

    def __eq__(self, other):
        return type(self) is type(other) and (
            self.get_params() == other.get_params())

    def __hash__(self):
        return hash((type(self).__name__,) + tuple(
            sorted(self.get_params().items())))


class Gaussian(ExponentialFamily):
    """Gaussian distributions with known variance.

    Parameters
    ----------
    variance : float (default=1.0)
      The variance ``sigma^2 > 0`` shared by all means of the family.

    """
    name = 'gaussian'

    def __init__(self, variance=1.0):
        if not np.isfinite(variance) or variance <= 0:
            raise InvalidParameterError(
                "Gaussian variance must be positive, got {!r}.".format(
                    variance))
        self.variance = variance

    def natural_of_mean(self, x):
        return np.asarray(x, dtype=float) / self.variance

    def phi(self, xi):
        return 0.5 * self.variance * np.square(xi)

    def phi_prime(self, xi):
        return self.variance * np.asarray(xi, dtype=float)

    def bregman(self, a, b):
        return 0.5 * self.variance * np.square(
            np.asarray(a, dtype=float) - np.asarray(b, dtype=float))

    def kl(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.square(x - y) / (2 * self.variance)
        return out if out.ndim else float(out)

    def sample(self, mean, rng, size=None):
        return rng.normal(mean, np.sqrt(self.variance), size=size)

    def sample_sum(self, mean, n, rng):
        n = np.asarray(n)
        return rng.normal(n * mean, np.sqrt(n * self.variance))

    def scale(self, mean):
        return np.sqrt(self.variance) * np.ones_like(mean, dtype=float)


def _log_ratio(x, y, diff=None):
    """``log(x / y)`` for positive arrays, accurate both when the
    arguments are close and when they are orders of magnitude apart.

    ``diff`` is ``x - y`` if it is known more accurately than the
    difference of the rounded arguments.

    """
    diff = x - y if diff is None else diff
    close = np.abs(diff) <= 0.5 * y
    with np.errstate(divide='ignore', invalid='ignore'):
        near = np.log1p(diff / y)
        far = np.log(x) - np.log(y)
    return np.where(close, near, far)


class Bernoulli(ExponentialFamily):
    """Bernoulli distributions, with mean domain ``(0, 1)``."""
    name = 'bernoulli'
    mean_domain = (0.0, 1.0)

    def natural_of_mean(self, x):
        return logit(self.check_mean(x))

    def phi(self, xi):
        return np.logaddexp(0.0, xi)

    def phi_prime(self, xi):
        return expit(xi)

    def kl(self, x, y):
        x = self.check_mean(x, closed=True)
        y = self.check_mean(y)
        x, y = np.broadcast_arrays(x, y)
        x_c, y_c = 1.0 - x, 1.0 - y
        with np.errstate(invalid='ignore'):
            # 0 log 0 = 0 at the closed boundary
            up = np.where(x > 0, x * _log_ratio(np.where(x > 0, x, 1.0), y), 0.0)
            down = np.where(
                x_c > 0, x_c * _log_ratio(np.where(x_c > 0, x_c, 1.0), y_c, y - x),
                0.0)
        out = np.maximum(up + down, 0.0)
        return out if out.ndim else float(out)

    def sample(self, mean, rng, size=None):
        return rng.binomial(1, mean, size=size)

    def sample_sum(self, mean, n, rng):
        return rng.binomial(n, mean)

    def scale(self, mean):
        mean = np.asarray(mean, dtype=float)
        return np.sqrt(mean * (1 - mean))


def natural_of_mean(family, x):
    """Natural parameter ``xi`` of the distribution with mean ``x``."""
    return family.natural_of_mean(x)


def mean_of_natural(family, xi):
    """Mean of the distribution with natural parameter ``xi``."""
    return family.mean_of_natural(xi)


def phi(family, xi):
    """Log-partition function of ``family``."""
    return family.phi(xi)


def phi_prime(family, xi):
    """Derivative of the log-partition function, i.e. the mean map."""
    return family.phi_prime(xi)


def phi_prime_inv(family, x):
    """Inverse of the mean map."""
    return family.phi_prime_inv(x)


def bregman(family, a, b):
    """Bregman divergence of ``phi`` between natural parameters
    ``a`` and ``b``.

    """
    return family.bregman(a, b)


def kl(family, x, y):
    """Kullback-Leibler divergence between the distributions of
    ``family`` with means ``x`` and ``y``.

    Parameters
    ----------
    family : ExponentialFamily
      The family of both distributions.

    x : float or np.ndarray
      Mean of the first distribution, in the closure of the mean
      domain. ``0 log 0 = 0`` applies on the boundary.

    y : float or np.ndarray
      Mean of the second distribution, in the open mean domain.

    Raises
    ------
    InvalidParameterError
      If ``y`` lies on the boundary or either mean lies outside.

    """
    return family.kl(x, y)


def sample(family, mean, rng, size=None):
    """Draw observations with the given mean from ``rng``."""
    return family.sample(mean, rng, size=size)


def sample_sum(family, mean, n, rng):
    """Draw the sum of ``n`` observations with the given mean.

    The sum is a sufficient statistic of the empirical mean, so this
    is equal in distribution to summing ``n`` calls of
    :func:`sample`. ``n`` may be an array.

    """
    return family.sample_sum(mean, n, rng)
