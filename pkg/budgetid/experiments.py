"""Tables behind the command line: difficulty queries, bound
evaluations, simulations and the named experiment bundles.

Every function returns a :class:`Table`; writing it to files is left
to :mod:`budgetid.cli`.

"""

import numpy as np

from budgetid.algorithms import Uniform
from budgetid.bounds import bernoulli_limit_constants
from budgetid.bounds import bernoulli_two_arm_bound
from budgetid.bounds import gaussian_bai_bound
from budgetid.bounds import gaussian_two_arm_corner_bound
from budgetid.bounds import halfspace_boundary_sample
from budgetid.bounds import halfspace_ratio_value
from budgetid.bounds import limsup_ratio_lb
from budgetid.bounds import positivity_bound
from budgetid.bounds import positivity_construction
from budgetid.bounds import positivity_ell_sweep
from budgetid.difficulty import DifficultyResult
from budgetid.difficulty import grid_oracle
from budgetid.difficulty import h_delta
from budgetid.difficulty import oracle_difficulty_sp
from budgetid.difficulty import sp_rate
from budgetid.exact import bernoulli_two_arm_error
from budgetid.exceptions import ConfigError
from budgetid.families import Bernoulli
from budgetid.families import Gaussian
from budgetid.simplex import relative_gap
from budgetid.simulator import Simulator
from budgetid.tasks import BAI
from budgetid.tasks import BanditInstance
from budgetid.tasks import HalfSpace


__all__ = [
    'BOUNDS',
    'BUNDLES',
    'Table',
    'bernoulli_two_arm_table',
    'compute_difficulty',
    'difficulty_table',
    'gaussian_logk_table',
    'gaussian_two_arm_table',
    'halfspace_table',
    'positivity_table',
    'simulation_table',
]


class Table:
    """Rows of values under a fixed list of columns."""

    def __init__(self, columns, rows=None):
        self.columns = list(columns)
        self.rows = []
        for row in rows or []:
            self.append(row)

    def append(self, row):
        missing = set(self.columns) - set(row)
        if missing:
            raise KeyError("Row lacks the columns {}.".format(sorted(missing)))
        self.rows.append({key: row[key] for key in self.columns})

    def column(self, key):
        return [row[key] for row in self.rows]

    def __len__(self):
        return len(self.rows)


def compute_difficulty(task, instance, selector='auto', **solver):
    """Difficulty ``H`` of ``instance`` as chosen by ``selector``.

    Parameters
    ----------
    selector : str (default='auto')
      ``'auto'``, ``'closed_form'`` or ``'optimizer'`` for
      :func:`oracle_difficulty_sp`, ``'h_delta'`` for the gap-based
      difficulty or ``'grid'`` for the brute-force oracle.

    solver : dict
      Keyword arguments of the selected function, e.g. ``tol`` or
      ``resolution``.

    Returns
    -------
    result : DifficultyResult or None
      None for the selector ``'none'``.

    """
    if selector == 'none':
        return None
    if selector == 'h_delta':
        return DifficultyResult(1.0 / h_delta(instance), [], [], 'h_delta')
    if selector == 'grid':
        return grid_oracle(task, instance, **solver)
    return oracle_difficulty_sp(task, instance, method=selector, **solver)


def difficulty_table(config):
    """One row per instance of a validated config: the difficulty, the
    optimal proportions and the worst-case alternative. With
    ``compare`` the optimizer is run as well and the relative gap of
    both values is reported.

    """
    columns = ['instance', 'H', 'omega_star', 'lambda_star', 'method']
    if config['compare']:
        columns += ['H_optimizer', 'rel_gap']
    solver = config.get_params_for('solver')
    selector_params = config.selector_params()

    table = Table(columns)
    for instance in config.instances_:
        result = compute_difficulty(
            config.task_, instance, config['H'], **selector_params)
        if result is None:
            raise ConfigError("The difficulty command needs an H selector.")
        row = {
            'instance': instance.means,
            'H': result.H,
            'omega_star': result.omega_star,
            'lambda_star': result.lambda_star,
            'method': result.method,
        }
        if config['compare']:
            optimized = oracle_difficulty_sp(
                config.task_, instance, method='optimizer', **solver)
            row['H_optimizer'] = optimized.H
            row['rel_gap'] = relative_gap(result.H, optimized.H)
        table.append(row)
    return table


def simulation_table(config, callbacks=None):
    """One row per instance and budget of a validated simulation
    config.

    """
    columns = [
        'instance', 'T', 'replications', 'errors', 'p_hat', 'ci_low',
        'ci_high', 'h_hat', 'H', 'ratio_hat', 'pre_asymptotic']
    table = Table(columns)
    selector_params = config.selector_params()
    for instance in config.instances_:
        result = compute_difficulty(
            config.task_, instance, config['H'], **selector_params)
        sim = Simulator(
            config.algorithm_,
            config.task_,
            instance,
            n_reps=int(config['n_reps']),
            seed=int(config['seed']),
            n_jobs=config.default_workers(),
            block_size=int(config['block_size']),
            callbacks=callbacks,
            verbose=config['verbose'],
            **config.callback_params(),
        )
        H = None if result is None else result.H
        for _, sim_result in sim.rate_curve(config.T_list, H=H):
            row = sim_result.to_dict()
            row['instance'] = instance.means
            table.append(row)
    return table


def _decades(spec):
    """Parse ``'3:12'`` into ``[3, ..., 12]``; lists pass through."""
    if isinstance(spec, str):
        low, high = spec.split(':')
        return list(range(int(low), int(high) + 1))
    return [int(d) for d in spec]


def bernoulli_two_arm_table(x_decades='3:12'):
    """Bernoulli two-arm corner bound at ``x = 10^-d``."""
    limit = bernoulli_limit_constants()['total']
    table = Table(['d', 'x', 'bound', 'term_first', 'term_second', 'limit'])
    for d in _decades(x_decades):
        x = 10.0 ** -d
        result = bernoulli_two_arm_bound(x)
        table.append({
            'd': d,
            'x': x,
            'bound': result.lower_bound,
            'term_first': result.contributions[0],
            'term_second': result.contributions[1],
            'limit': limit,
        })
    return table


def gaussian_logk_table(K=(10, 100, 1000, 10000), delta=1.0):
    """Gaussian BAI corner bound against its ``log K`` references."""
    columns = ['K', 'bound', 'floor', 'harmonic', 'chain', 'csp_bound',
               'csp_chain']
    table = Table(columns)
    for n_arms in np.atleast_1d(K):
        result = gaussian_bai_bound(int(n_arms), delta)
        row = dict(result.details, K=int(n_arms), bound=result.lower_bound)
        table.append(row)
    return table


def positivity_table(K=5, m=0.6, theta=0.5, ell=None, family='bernoulli',
                     sweep_ell=False, n_points=6):
    """Positivity corner bound, optionally over a sweep of ``ell``
    towards the lower end of the mean domain.

    ``uniform_ratio`` is ``sp_rate`` of uniform sampling at the first
    alternative divided by its oracle difficulty; it never exceeds
    ``K``.

    """
    family = Bernoulli() if family == 'bernoulli' else Gaussian()
    if sweep_ell:
        ells = positivity_ell_sweep(theta, family, n_points)
    elif ell is None:
        ells = [1e-6 if isinstance(family, Bernoulli) else theta - 1e5]
    else:
        ells = np.atleast_1d(ell)

    columns = ['family', 'K', 'm', 'theta', 'ell', 'bound', 'limit',
               'fraction_of_K', 'uniform_ratio']
    table = Table(columns)
    for value in ells:
        value = float(value)
        result = positivity_bound(K, m, value, theta, family)
        construction = positivity_construction(K, m, value, theta, family)
        _, lam = construction.perturbations[0]
        alternative = construction.instance.with_means(lam)
        uniform = np.full(alternative.n_arms, 1.0 / alternative.n_arms)
        ratio = (sp_rate(construction.task, alternative, uniform)
                 / construction.H(alternative))
        table.append({
            'family': family.name,
            'K': K,
            'm': m,
            'theta': theta,
            'ell': value,
            'bound': result.lower_bound,
            'limit': result.details['limit'],
            'fraction_of_K': result.lower_bound / K,
            'uniform_ratio': ratio,
        })
    return table


def gaussian_two_arm_table(delta=(0.5, 1.0, 2.0), spread=1e6):
    """Best two-arm Gaussian corner bound, below 1/2 for every gap."""
    table = Table(['delta', 'spread', 'bound'])
    for value in np.atleast_1d(delta):
        result = gaussian_two_arm_corner_bound(float(value), spread)
        table.append({'delta': float(value), 'spread': spread,
                      'bound': result.lower_bound})
    return table


def halfspace_table(means=(0.01, 0.0, -0.005), u=(1.0, 1.0, 1.0), offset=0.0,
                    n_points=(65, 129, 257)):
    """Ratio lower bound of Gaussian half-space identification from
    samples of alternatives of growing size, against the value 1 of
    the full alternative set.

    """
    instance = BanditInstance(list(means), Gaussian(1.0))
    task = HalfSpace(list(u), offset)
    reference = halfspace_ratio_value(instance, task)
    table = Table(['n_points', 'lower_bound', 'reference'])
    for n in np.atleast_1d(n_points):
        alternatives, H_values = halfspace_boundary_sample(
            instance, task, int(n))
        result = limsup_ratio_lb(instance, alternatives, H_values, task=task)
        table.append({'n_points': int(n), 'lower_bound': result.lower_bound,
                      'reference': reference})
    return table


BOUNDS = {
    'bernoulli-two-arm': bernoulli_two_arm_table,
    'gaussian-logk': gaussian_logk_table,
    'positivity': positivity_table,
    'gaussian-two-arm': gaussian_two_arm_table,
    'halfspace': halfspace_table,
}


def _bernoulli_limit_bundle(seed, workers, n_reps):
    return {'x_decades': '3:12'}, bernoulli_two_arm_table('3:12')


def _gaussian_logk_bundle(seed, workers, n_reps):
    K = [10, 100, 1000, 10000]
    return {'K': K, 'delta': 1.0}, gaussian_logk_table(K)


def _positivity_bundle(seed, workers, n_reps):
    params = {'K': 5, 'm': 0.6, 'theta': 0.5, 'sweep_ell': True}
    table = positivity_table(family='bernoulli', **params)
    for row in positivity_table(family='gaussian', **params).rows:
        table.append(row)
    return params, table


def _halfspace_bundle(seed, workers, n_reps):
    params = {'means': [0.01, 0.0, -0.005], 'u': [1.0, 1.0, 1.0],
              'offset': 0.0, 'n_points': [65, 129, 257]}
    return params, halfspace_table(**params)


def _sp_rate_bundle(seed, workers, n_reps):
    n_reps = n_reps or 100000
    params = {'means': [0.6, 0.4], 'family': 'bernoulli',
              'algorithm': 'uniform', 'T_list': [100, 200, 400],
              'n_reps': n_reps}
    instance = BanditInstance(params['means'], Bernoulli())
    task = BAI()
    uniform = np.full(2, 0.5)
    limit = sp_rate(task, instance, uniform)

    sim = Simulator(Uniform(), task, instance, n_reps=n_reps, seed=seed,
                    n_jobs=workers, verbose=0)
    columns = ['T', 'replications', 'errors', 'p_hat', 'ci_low', 'ci_high',
               'h_hat', 'sp_rate', 'rel_dev', 'exact_p', 'exact_h',
               'exact_rel_dev']
    table = Table(columns)
    for T, result in sim.rate_curve(params['T_list']):
        exact_p = bernoulli_two_arm_error(instance.means, [T // 2, T - T // 2])
        exact_h = T / np.log(1 / exact_p)
        row = result.to_dict()
        row.update({
            'sp_rate': limit,
            'rel_dev': (None if result.h_hat is None
                        else abs(result.h_hat - limit) / limit),
            'exact_p': exact_p,
            'exact_h': exact_h,
            'exact_rel_dev': abs(exact_h - limit) / limit,
        })
        table.append(row)
    return params, table


BUNDLES = {
    'bernoulli-limit': _bernoulli_limit_bundle,
    'gaussian-logk': _gaussian_logk_bundle,
    'positivity-k': _positivity_bundle,
    'halfspace-one': _halfspace_bundle,
    'sp-rate-ldp': _sp_rate_bundle,
}
