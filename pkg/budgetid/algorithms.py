"""Fixed-budget algorithm families.

Every algorithm maps a budget ``T`` to a sampling rule and a
recommendation. Static proportions follow a deterministic tracking
rule and recommend the empirical answer; successive rejects and
successive halving eliminate arms in phases and recommend the last
surviving arm.

Simulation works on blocks of replications at once: per phase, the
sum of the observations of each arm is drawn directly from its
sufficient statistic.

"""

import numpy as np
from sklearn.base import BaseEstimator

from budgetid.exceptions import InvalidParameterError
from budgetid.exceptions import TrackingInvariantError
from budgetid.exceptions import UnsupportedError
from budgetid.tasks import BAI
from budgetid.tasks import correct_answer
from budgetid.utils import as_weights


__all__ = [
    'Algorithm',
    'StaticProportions',
    'SuccessiveHalving',
    'SuccessiveRejects',
    'TrackingRule',
    'Uniform',
    'run_once',
    'successive_halving_schedule',
    'successive_rejects_schedule',
    'track',
]


def track(omegas, T, check=False):
    """Run the tracking rule for one or several weight vectors.

    At every step ``t`` (the number of pulls so far) the rule pulls
    ``argmin_k N_k - omega_k t``, the lowest index on ties. Arms with
    zero weight are never pulled.

    Parameters
    ----------
    omegas : array-like of shape (K,) or (R, K)
      Points of the simplex.

    T : int
      Number of pulls.

    check : bool (default=False)
      Whether to check ``|N_{t,k} - omega_k t| <= K`` after every pull.

    Returns
    -------
    counts : np.ndarray of shape (R, K)
      Pull counts after ``T`` steps.

    max_deviation : float
      Largest ``|N_{t,k} - omega_k t|`` over all prefixes, or ``nan``
      if ``check`` is False.

    Raises
    ------
    TrackingInvariantError
      If ``check`` is True and a prefix violates the bound.

    """
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    n_runs, K = omegas.shape
    counts = np.zeros((n_runs, K), dtype=np.int64)
    rows = np.arange(n_runs)
    blocked = np.where(omegas > 0, 0.0, np.inf)
    max_deviation = 0.0 if check else np.nan

    for t in range(T):
        arms = np.argmin(counts - omegas * t + blocked, axis=1)
        counts[rows, arms] += 1
        if check:
            deviation = np.max(np.abs(counts - omegas * (t + 1)))
            max_deviation = max(max_deviation, deviation)
            if deviation > K:
                raise TrackingInvariantError(
                    "Pull counts deviate by {!r} > K={} after {} pulls.".format(
                        deviation, K, t + 1))
    return counts, max_deviation


class TrackingRule:
    """The deterministic sampling rule of static proportions ``omega``.

    Parameters
    ----------
    omega : array-like of shape (K,)
      Target proportions, a point of the simplex.

    check : bool (default=False)
      Check the tracking bound at every prefix.

    """
    def __init__(self, omega, check=False):
        self.omega = as_weights(omega)
        self.check = check
        self._counts = {}

    @property
    def n_arms(self):
        return len(self.omega)

    def path(self, T):
        """The arm pulled at each of the ``T`` steps."""
        omega = self.omega
        blocked = np.where(omega > 0, 0.0, np.inf)
        counts = np.zeros(self.n_arms, dtype=np.int64)
        pulls = np.empty(T, dtype=np.int64)
        for t in range(T):
            arm = int(np.argmin(counts - omega * t + blocked))
            counts[arm] += 1
            pulls[t] = arm
        return pulls

    def counts(self, T):
        """Pull counts ``N_T`` after ``T`` steps."""
        if T not in self._counts:
            counts, _ = track(self.omega, T, check=self.check)
            self._counts[T] = counts[0]
        return self._counts[T].copy()


def successive_rejects_schedule(K, T):
    """Pulls per surviving arm in each phase of successive rejects.

    Phase ``k`` ends once every survivor has been pulled

        n_k = ceil((T - K) / (logbar(K) (K + 1 - k)))

    times, with ``logbar(K) = 1/2 + sum_{i=2..K} 1/i``.

    Returns
    -------
    increments : np.ndarray of shape (K - 1,)
      ``n_k - n_{k-1}``, the pulls of each survivor in phase ``k``.

    remainder : int
      The budget left once all phases are done; it is spent in the
      final phase.

    Raises
    ------
    UnsupportedError
      If ``T <= K``.

    """
    if K < 2:
        raise InvalidParameterError("Need K >= 2 arms, got {}.".format(K))
    if T <= K:
        raise UnsupportedError(
            "Successive rejects needs T > K, got T={} for K={}.".format(T, K))
    logbar = 0.5 + np.sum(1.0 / np.arange(2, K + 1))
    k = np.arange(1, K)
    n = np.ceil((T - K) / (logbar * (K + 1 - k))).astype(np.int64)
    increments = np.diff(n, prepend=0)
    used = int(np.sum(increments * (K + 1 - k)))
    return increments, T - used


def successive_halving_schedule(K, T):
    """Budget of each round of successive halving.

    There are ``ceil(log2 K)`` rounds with ``floor(T / rounds)`` pulls
    each; the last round also gets what is left of ``T``.

    Raises
    ------
    UnsupportedError
      If ``T < K ceil(log2 K)``, which leaves a survivor unpulled.

    """
    if K < 2:
        raise InvalidParameterError("Need K >= 2 arms, got {}.".format(K))
    rounds = int(np.ceil(np.log2(K)))
    if T < K * rounds:
        raise UnsupportedError(
            "Successive halving needs T >= {} for K={}, got T={}.".format(
                K * rounds, K, T))
    budgets = np.full(rounds, T // rounds, dtype=np.int64)
    budgets[-1] += T - budgets.sum()
    return budgets


def _empirical_means(sums, counts):
    with np.errstate(divide='ignore', invalid='ignore'):
        return np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)


def _draw_sums(instance, counts, rng):
    """Sums of ``counts[..., k]`` observations of every arm ``k``."""
    counts = np.asarray(counts)
    sums = np.empty(counts.shape, dtype=float)
    for k, (family, mean) in enumerate(zip(instance.families, instance.means)):
        sums[..., k] = family.sample_sum(mean, counts[..., k], rng)
    return sums


class Algorithm(BaseEstimator):
    """Base class of fixed-budget algorithm families."""

    def check(self, task, instance, T):
        """Raise if the algorithm cannot run on this problem."""
        if T < instance.n_arms:
            raise InvalidParameterError(
                "The budget T={} is smaller than K={}.".format(
                    T, instance.n_arms))

    def recommend(self, task, instance, T, rng, size):
        """Run ``size`` independent replications.

        Returns
        -------
        answers : list or np.ndarray of length ``size``
          The recommendations.

        counts : np.ndarray of shape (size, K)
          Final pull counts of every replication.

        """
        raise NotImplementedError

    def errors(self, task, instance, T, rng, size):
        """Boolean vector telling which of ``size`` replications
        recommend a wrong answer.

        """
        raise NotImplementedError


class StaticProportions(Algorithm):
    """Pull arms by tracking fixed proportions ``omega``, then
    recommend the correct answer of the empirical means.

    Parameters
    ----------
    omega : array-like of shape (K,)
      Interior point of the simplex.

    check_tracking : bool (default=False)
      Check the tracking bound at every prefix.

    """
    def __init__(self, omega=None, check_tracking=False):
        self.omega = omega
        self.check_tracking = check_tracking

    def weights(self, instance):
        return as_weights(self.omega, n_arms=instance.n_arms, interior=True)

    def tracking_rule(self, instance):
        omega = self.weights(instance)
        rule = getattr(self, 'tracking_rule_', None)
        if rule is None or not np.array_equal(rule.omega, omega):
            rule = TrackingRule(omega, check=self.check_tracking)
            self.tracking_rule_ = rule
        return rule

    def check(self, task, instance, T):
        super().check(task, instance, T)
        self.weights(instance)

    def empirical_means(self, instance, T, rng, size):
        counts = self.tracking_rule(instance).counts(T)
        batch = np.broadcast_to(counts, (size, instance.n_arms))
        sums = _draw_sums(instance, batch, rng)
        return _empirical_means(sums, batch), batch

    def recommend(self, task, instance, T, rng, size):
        self.check(task, instance, T)
        means, counts = self.empirical_means(instance, T, rng, size)
        return [task.answer(row) for row in means], counts

    def errors(self, task, instance, T, rng, size):
        self.check(task, instance, T)
        correct = correct_answer(task, instance)
        means, _ = self.empirical_means(instance, T, rng, size)
        return ~task.agrees(means, correct)


class Uniform(StaticProportions):
    """Static proportions with equal weights."""

    # pylint: disable=super-init-not-called
    def __init__(self, check_tracking=False):
        self.check_tracking = check_tracking

    def weights(self, instance):
        return np.full(instance.n_arms, 1.0 / instance.n_arms)


class _Elimination(Algorithm):
    """Shared machinery of algorithms that eliminate arms in phases and
    recommend the last survivor (best arm identification only).

    """
    def check(self, task, instance, T):
        super().check(task, instance, T)
        if not isinstance(task, BAI):
            raise UnsupportedError(
                "{} only supports best arm identification, got {!r}.".format(
                    type(self).__name__, task))

    def eliminate(self, instance, T, rng, size):
        raise NotImplementedError

    def recommend(self, task, instance, T, rng, size):
        self.check(task, instance, T)
        return self.eliminate(instance, T, rng, size)

    def errors(self, task, instance, T, rng, size):
        self.check(task, instance, T)
        correct = correct_answer(task, instance)
        winners, _ = self.eliminate(instance, T, rng, size)
        return winners != correct


class SuccessiveRejects(_Elimination):
    """Successive rejects: ``K - 1`` phases, each dropping the arm with
    the lowest empirical mean (the highest index on ties).

    See :func:`successive_rejects_schedule` for the budget split.

    """
    def check(self, task, instance, T):
        super().check(task, instance, T)
        successive_rejects_schedule(instance.n_arms, T)

    def eliminate(self, instance, T, rng, size):
        K = instance.n_arms
        increments, remainder = successive_rejects_schedule(K, T)
        alive = np.ones((size, K), dtype=bool)
        counts = np.zeros((size, K), dtype=np.int64)
        sums = np.zeros((size, K))
        rows = np.arange(size)

        for phase, inc in enumerate(increments):
            pulls = alive * inc
            if phase == len(increments) - 1 and remainder:
                # two survivors share the remainder, the lower index first
                rank = np.cumsum(alive, axis=1) - 1
                share = np.where(rank == 0, (remainder + 1) // 2,
                                 remainder // 2)
                pulls = pulls + alive * share
            sums += _draw_sums(instance, pulls, rng)
            counts += pulls

            means = np.where(alive, _empirical_means(sums, counts), np.inf)
            worst = K - 1 - np.argmin(means[:, ::-1], axis=1)
            alive[rows, worst] = False

        return np.argmax(alive, axis=1), counts


class SuccessiveHalving(_Elimination):
    """Successive halving: ``ceil(log2 K)`` rounds, each keeping the
    ``ceil(|S| / 2)`` survivors with the highest empirical means (the
    lowest indices on ties).

    In every round each survivor gets ``floor(b / |S|)`` pulls of the
    round budget ``b``; the rest goes one pull at a time to the
    survivors with the lowest indices. Empirical means use all the
    observations of an arm so far.

    """
    def check(self, task, instance, T):
        super().check(task, instance, T)
        successive_halving_schedule(instance.n_arms, T)

    def eliminate(self, instance, T, rng, size):
        K = instance.n_arms
        budgets = successive_halving_schedule(K, T)
        alive = np.ones((size, K), dtype=bool)
        counts = np.zeros((size, K), dtype=np.int64)
        sums = np.zeros((size, K))
        n_alive = K

        for budget in budgets:
            base, extra = divmod(int(budget), n_alive)
            rank = np.cumsum(alive, axis=1) - 1
            pulls = alive * (base + (rank < extra))
            sums += _draw_sums(instance, pulls, rng)
            counts += pulls

            means = np.where(alive, _empirical_means(sums, counts), -np.inf)
            order = np.argsort(-means, axis=1, kind='stable')
            n_alive = (n_alive + 1) // 2
            alive = np.zeros((size, K), dtype=bool)
            np.put_along_axis(alive, order[:, :n_alive], True, axis=1)

        return np.argmax(alive, axis=1), counts


def run_once(alg, task, instance, T, rng):
    """Run one replication of ``alg``.

    Parameters
    ----------
    alg : Algorithm

    task : Task

    instance : BanditInstance

    T : int
      The budget, at least ``K``.

    rng : np.random.Generator or int
      Source of randomness; an int seeds a fresh generator.

    Returns
    -------
    answer
      The recommendation.

    counts : np.ndarray of shape (K,)
      The final pull counts, summing to ``T``.

    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    answers, counts = alg.recommend(task, instance, T, rng, 1)
    answer = answers[0]
    if isinstance(answer, np.integer):
        answer = int(answer)
    return answer, np.asarray(counts[0])
