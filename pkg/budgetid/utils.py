"""budgetid utilities.

Should not have any dependency on other budgetid modules except for
the exceptions.

"""

from contextlib import contextmanager
import hashlib
import json
import pathlib

import numpy as np

from budgetid.exceptions import InvalidWeightsError


__all__ = [
    'as_weights',
    'config_hash',
    'format_float',
    'make_generator',
    'open_file_like',
    'params_for',
    'to_jsonable',
]


def params_for(prefix, kwargs):
    """Extract parameters that belong to a given prefix from
    ``kwargs``. This is useful to obtain parameters that belong to a
    nested component, e.g. the task of an experiment config.

    Examples
    --------
    >>> kwargs = {'task__theta': 0.5, 'task__u': [1, -1], 'seed': 3}
    >>> params_for('task', kwargs)
    {'theta': 0.5, 'u': [1, -1]}

    """
    if not prefix.endswith('__'):
        prefix += '__'
    return {key[len(prefix):]: val for key, val in kwargs.items()
            if key.startswith(prefix)}


@contextmanager
def open_file_like(f, mode):
    """Wrapper for opening a file"""
    new_fd = isinstance(f, (str, pathlib.Path))
    if new_fd:
        # LF line endings on every platform
        f = open(f, mode, encoding='utf-8', newline='\n')
    try:
        yield f
    finally:
        if new_fd:
            f.close()


def as_weights(omega, n_arms=None, interior=False, atol=1e-12):
    """Validate a vector of sampling proportions.

    Parameters
    ----------
    omega : array-like of shape (K,)
      Candidate point of the simplex.

    n_arms : int or None (default=None)
      If not None, the required length of ``omega``.

    interior : bool (default=False)
      Whether every coordinate must be strictly positive.

    atol : float (default=1e-12)
      Tolerance on the sum of the coordinates.

    Returns
    -------
    omega : np.ndarray
      A float copy of the weights.

    Raises
    ------
    InvalidWeightsError
      If the weights are not on the (interior of the) simplex.

    """
    omega = np.array(omega, dtype=float)
    if omega.ndim != 1:
        raise InvalidWeightsError("Weights must be a 1d vector.")
    if n_arms is not None and len(omega) != n_arms:
        raise InvalidWeightsError(
            "Expected {} weights, got {}.".format(n_arms, len(omega)))
    if not np.all(np.isfinite(omega)) or np.any(omega < 0):
        raise InvalidWeightsError("Weights must be finite and nonnegative.")
    if abs(omega.sum() - 1.0) > atol:
        raise InvalidWeightsError(
            "Weights must sum to 1, they sum to {!r}.".format(omega.sum()))
    if interior and np.any(omega <= 0):
        raise InvalidWeightsError(
            "Weights must lie in the interior of the simplex, got "
            "{!r}.".format(omega.tolist()))
    return omega


def make_generator(seed, replication):
    """Return the counter-based random generator of one replication.

    The stream only depends on ``(seed, replication)``, so replications
    can be grouped into blocks of any size, produced in any order and
    by any worker.

    """
    seq = np.random.SeedSequence([int(seed), int(replication)])
    return np.random.Generator(np.random.Philox(seq))


def format_float(value):
    """Format a number with 17 significant digits; ``None`` and
    non-finite values become empty strings or their name.

    """
    if value is None:
        return ''
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), '.17g')
    if isinstance(value, (list, tuple, np.ndarray)):
        return ';'.join(format_float(v) for v in value)
    return str(value)


def to_jsonable(value):
    """Convert numpy scalars and arrays (possibly nested in lists,
    tuples and dicts) to plain python objects.

    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(val) for key, val in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(val) for val in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(val) for val in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def config_hash(config):
    """Short, stable hash of a json-serializable config dict."""
    canonical = json.dumps(
        to_jsonable(config), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]
