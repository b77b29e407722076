"""Monte Carlo estimation of error probabilities and empirical rates.

The :class:`Simulator` runs replications of an algorithm in fixed-size
blocks. Replication ``r`` draws from a Philox stream keyed by
``(seed, r)``, blocks are spread over ``n_jobs`` workers with joblib
and merged by summing their error counts, so a result depends neither
on ``n_jobs`` nor on ``block_size``.

"""

import warnings

import numpy as np
from joblib import Parallel
from joblib import delayed
from scipy.stats import norm
from sklearn.base import BaseEstimator

from budgetid.callbacks import PointTimer
from budgetid.callbacks import PrintLog
from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import PreAsymptoticWarning
from budgetid.history import History
from budgetid.tasks import correct_answer
from budgetid.utils import make_generator
from budgetid.utils import params_for


__all__ = [
    'SimResult',
    'Simulator',
    'estimate_error',
    'rate_curve',
    'wilson_interval',
]

Z_99 = norm.ppf(0.995)


def wilson_interval(errors, replications, z=Z_99):
    """Wilson score interval of a binomial proportion, clipped so that
    it always contains ``errors / replications``.

    """
    n = replications
    p = errors / n
    denom = 1 + z ** 2 / n
    center = (p + z ** 2 / (2 * n)) / denom
    half = z * np.sqrt(p * (1 - p) / n + z ** 2 / (4 * n ** 2)) / denom
    low = min(max(center - half, 0.0), p)
    high = max(min(center + half, 1.0), p)
    return low, high


class SimResult:
    """Outcome of the replications of one budget ``T``.

    Parameters
    ----------
    T : int
      The budget.

    replications : int
      Number of replications.

    errors : int
      Number of replications that recommended a wrong answer.

    H : float or None (default=None)
      Reference difficulty; if given, ``ratio_hat = h_hat / H``.

    Attributes
    ----------
    p_hat : float
      ``errors / replications``.

    ci : tuple of float
      99% Wilson interval of the error probability.

    h_hat : float or None
      Empirical rate ``T / log(1 / p_hat)``; None when ``p_hat`` is 0
      or 1.

    ratio_hat : float or None

    pre_asymptotic : bool
      True if ``p_hat >= 1/2``, where ``h_hat`` carries no information.

    """
    def __init__(self, T, replications, errors, H=None):
        if replications < 1 or not 0 <= errors <= replications:
            raise InvalidParameterError(
                "Need 0 <= errors <= replications and replications >= 1, got "
                "{} errors in {} replications.".format(errors, replications))
        self.T = int(T)
        self.replications = int(replications)
        self.errors = int(errors)
        self.H = H

        self.p_hat = self.errors / self.replications
        self.ci = wilson_interval(self.errors, self.replications)
        self.pre_asymptotic = self.p_hat >= 0.5
        if 0 < self.p_hat < 1:
            self.h_hat = self.T / np.log(1 / self.p_hat)
        else:
            self.h_hat = None
        if self.h_hat is not None and H is not None:
            self.ratio_hat = self.h_hat / H
        else:
            self.ratio_hat = None

    @property
    def halfwidth(self):
        return (self.ci[1] - self.ci[0]) / 2

    def to_dict(self):
        return {
            'T': self.T,
            'replications': self.replications,
            'errors': self.errors,
            'p_hat': self.p_hat,
            'ci_low': self.ci[0],
            'ci_high': self.ci[1],
            'h_hat': self.h_hat,
            'H': self.H,
            'ratio_hat': self.ratio_hat,
            'pre_asymptotic': self.pre_asymptotic,
        }

    def __eq__(self, other):
        return isinstance(other, SimResult) and self.to_dict() == other.to_dict()

    def __repr__(self):
        return 'SimResult(T={}, errors={}/{}, p_hat={:.6g})'.format(
            self.T, self.errors, self.replications, self.p_hat)


def _count_errors(algorithm, task, instance, T, seed, start, size):
    errors = 0
    for replication in range(start, start + size):
        rng = make_generator(seed, replication)
        errors += int(np.count_nonzero(
            algorithm.errors(task, instance, T, rng, 1)))
    return errors


class Simulator(BaseEstimator):
    """Estimate error probabilities of an algorithm by simulation.

    Parameters
    ----------
    algorithm : Algorithm
      The algorithm family, e.g. :class:`budgetid.algorithms.Uniform`.

    task : Task

    instance : BanditInstance

    n_reps : int (default=10000)
      Replications per budget.

    seed : int (default=0)
      Master seed; replication ``r`` uses the stream keyed by
      ``(seed, r)``.

    n_jobs : int (default=1)
      Number of joblib workers. Results do not depend on it.

    block_size : int (default=10000)
      Replications per block, the unit of work of a joblib worker.
      Results do not depend on it.

    callbacks : None or list of Callback instances (default=None)
      More callbacks, in addition to those returned by
      ``get_default_callbacks``. Each callback should inherit from
      :class:`budgetid.callbacks.Callback`. A callback may be given
      as a ``(name, callback)`` tuple, otherwise its name is its class
      name. Parameters of callbacks are set with
      ``callbacks__<name>__<param>``.

    verbose : int (default=1)
      Control the verbosity level.

    Attributes
    ----------
    history_ : History
      One row per simulated budget, with one entry per replication
      block in ``'blocks'``.

    callbacks_ : list of tuples
      The complete (i.e. default and other), initialized callbacks, in
      a tuple with unique names.

    """
    def __init__(
            self,
            algorithm,
            task,
            instance,
            n_reps=10000,
            seed=0,
            n_jobs=1,
            block_size=10000,
            callbacks=None,
            verbose=1,
            **kwargs
    ):
        self.algorithm = algorithm
        self.task = task
        self.instance = instance
        self.n_reps = n_reps
        self.seed = seed
        self.n_jobs = n_jobs
        self.block_size = block_size
        self.callbacks = callbacks
        self.verbose = verbose

        self._check_kwargs(kwargs)
        vars(self).update(kwargs)

    def _check_kwargs(self, kwargs):
        unexpected = [key for key in kwargs if not key.startswith('callbacks__')]
        if unexpected:
            raise TypeError(
                "__init__() got unexpected argument(s) {}. Only "
                "callbacks__<name>__<param> may be passed as extra keyword "
                "arguments.".format(', '.join(sorted(unexpected))))

    def _get_param_names(self):
        return (k for k in self.__dict__ if not k.endswith('_'))

    def get_default_callbacks(self):
        return [
            ('point_timer', PointTimer()),
            ('print_log', PrintLog()),
        ]

    def _yield_callbacks(self):
        print_logs = []
        for item in self.get_default_callbacks() + (self.callbacks or []):
            if isinstance(item, (tuple, list)):
                name, cb = item
            else:
                cb = item
                name = cb.__name__ if isinstance(cb, type) else type(cb).__name__
            if isinstance(cb, PrintLog) or cb is PrintLog:
                print_logs.append((name, cb))
            else:
                yield name, cb
        yield from print_logs

    def initialize_callbacks(self):
        """Initializes all callbacks and save the result in the
        ``callbacks_`` attribute.

        Callback names must be unique; parameters given as
        ``callbacks__<name>__<param>`` are set before ``initialize`` is
        called on each callback. ``PrintLog`` callbacks come last.

        """
        callbacks_ = []
        names = set()
        for name, cb in self._yield_callbacks():
            if name in names:
                raise ValueError("Found duplicate callback name '{}'. Use "
                                 "unique names to correct this.".format(name))
            names.add(name)

            params = params_for('callbacks__{}'.format(name), vars(self))
            if isinstance(cb, type):
                cb = cb(**params)
            else:
                cb.set_params(**params)
            cb.initialize()
            callbacks_.append((name, cb))

        # pylint: disable=attribute-defined-outside-init
        self.callbacks_ = callbacks_
        return self

    def initialize(self):
        """Validate the parameters and (re-)set the callbacks and the
        history.

        """
        if self.n_reps < 1:
            raise InvalidParameterError(
                "n_reps must be at least 1, got {}.".format(self.n_reps))
        if self.block_size < 1:
            raise InvalidParameterError(
                "block_size must be at least 1, got {}.".format(
                    self.block_size))
        correct_answer(self.task, self.instance)
        self.initialize_callbacks()
        # pylint: disable=attribute-defined-outside-init
        self.history_ = History()
        self.initialized_ = True
        return self

    def notify(self, method_name, **cb_kwargs):
        """Call the callback method specified in ``method_name`` with
        parameters specified in ``cb_kwargs``.

        Method names can be one of:
        * on_run_begin
        * on_run_end
        * on_point_begin
        * on_point_end
        * on_block_end

        """
        for _, cb in self.callbacks_:
            getattr(cb, method_name)(self, **cb_kwargs)

    def block_sizes(self):
        """Replications of every block; only the last one may be
        smaller than ``block_size``.

        """
        full, rest = divmod(self.n_reps, self.block_size)
        return [self.block_size] * full + ([rest] if rest else [])

    def _run_point(self, T, H):
        self.algorithm.check(self.task, self.instance, T)
        sizes = self.block_sizes()
        self.history_.new_row(T=T)
        self.notify('on_point_begin', T=T, n_blocks=len(sizes))

        parallel = Parallel(n_jobs=self.n_jobs, return_as='generator')
        jobs = (
            delayed(_count_errors)(
                self.algorithm, self.task, self.instance, T, self.seed,
                start, size)
            for start, size in zip(np.cumsum([0] + sizes[:-1]), sizes))

        errors = 0
        for block, (size, block_errors) in enumerate(
                zip(sizes, parallel(jobs))):
            errors += block_errors
            self.history_.new_block()
            self.history_.record_block('block', block)
            self.history_.record_block('replications', size)
            self.history_.record_block('errors', block_errors)
            self.notify('on_block_end', block=block, errors=block_errors,
                        replications=size)

        result = SimResult(T, self.n_reps, errors, H=H)
        if result.pre_asymptotic:
            warnings.warn(
                "At T={} the estimated error probability is {:.3g} >= 1/2; "
                "its empirical rate is pre-asymptotic.".format(
                    T, result.p_hat), PreAsymptoticWarning)
        for key, value in result.to_dict().items():
            self.history_.record(key, value)
        self.notify('on_point_end', T=T, result=result)
        return result

    def estimate(self, T, H=None):
        """Estimate the error probability at budget ``T``.

        Parameters
        ----------
        T : int
          The budget.

        H : float or None (default=None)
          Reference difficulty for the ratio estimate.

        Returns
        -------
        result : SimResult

        """
        return self.rate_curve([T], H=H)[0][1]

    def rate_curve(self, T_list, H=None):
        """Estimate the error probability at every budget of
        ``T_list``, which must be increasing.

        Returns
        -------
        curve : list of (int, SimResult)

        """
        T_list = [int(T) for T in T_list]
        if not T_list or any(b <= a for a, b in zip(T_list, T_list[1:])):
            raise InvalidParameterError(
                "T_list must be a nonempty increasing sequence, got "
                "{!r}.".format(T_list))
        if not getattr(self, 'initialized_', False):
            self.initialize()

        self.notify('on_run_begin', T_list=T_list)
        try:
            curve = [(T, self._run_point(T, H)) for T in T_list]
        finally:
            self.notify('on_run_end', T_list=T_list)
        return curve


def estimate_error(alg, task, instance, T, n_reps, master_seed, H=None,
                   **kwargs):
    """Estimate ``P(recommendation != correct answer)`` of ``alg`` at
    budget ``T`` from ``n_reps`` replications.

    Further keyword arguments are passed to :class:`Simulator`.

    Returns
    -------
    result : SimResult

    """
    kwargs.setdefault('verbose', 0)
    sim = Simulator(alg, task, instance, n_reps=n_reps, seed=master_seed,
                    **kwargs)
    return sim.estimate(T, H=H)


def rate_curve(alg, task, instance, T_list, n_reps, seed, H=None, **kwargs):
    """Error probabilities and empirical rates over the budgets of
    ``T_list``.

    Returns
    -------
    curve : list of (int, SimResult)

    """
    kwargs.setdefault('verbose', 0)
    sim = Simulator(alg, task, instance, n_reps=n_reps, seed=seed, **kwargs)
    return sim.rate_curve(T_list, H=H)
