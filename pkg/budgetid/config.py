"""Experiment configuration.

An experiment is described by a flat JSON object. Nested components
use the double-underscore convention, e.g.

.. code:: json

    {
      "task": "thresholding",
      "task__theta": 0.5,
      "family": "bernoulli",
      "instances": [[0.6, 0.3, 0.55]],
      "algorithm": "uniform",
      "T_list": [100, 200, 400],
      "n_reps": 100000,
      "seed": 7
    }

Components are looked up in the registries below by name; a dotted
name such as ``"mypackage.tasks.MyTask"`` is imported instead.

"""

from importlib import import_module
import json
import os

import numpy as np

from budgetid.algorithms import StaticProportions
from budgetid.algorithms import SuccessiveHalving
from budgetid.algorithms import SuccessiveRejects
from budgetid.algorithms import Uniform
from budgetid.exceptions import BudgetIdException
from budgetid.exceptions import ConfigError
from budgetid.families import Bernoulli
from budgetid.families import Gaussian
from budgetid.tasks import BAI
from budgetid.tasks import BanditInstance
from budgetid.tasks import HalfSpace
from budgetid.tasks import Positivity
from budgetid.tasks import Thresholding
from budgetid.tasks import correct_answer
from budgetid.toy import make_two_arm_grid
from budgetid.toy import random_instance
from budgetid.utils import config_hash
from budgetid.utils import open_file_like
from budgetid.utils import params_for


__all__ = ['ExperimentConfig', 'resolve']


TASKS = {
    'bai': BAI,
    'thresholding': Thresholding,
    'positivity': Positivity,
    'halfspace': HalfSpace,
}

FAMILIES = {
    'gaussian': Gaussian,
    'bernoulli': Bernoulli,
}

ALGORITHMS = {
    'uniform': Uniform,
    'static': StaticProportions,
    'successive_rejects': SuccessiveRejects,
    'successive_halving': SuccessiveHalving,
}

H_SELECTORS = ('auto', 'closed_form', 'optimizer', 'h_delta', 'grid', 'none')

KEYS = {
    'task', 'family', 'instance', 'instances', 'algorithm', 'T', 'T_list',
    'n_reps', 'seed', 'workers', 'block_size', 'H', 'compare', 'out',
    'name', 'verbose',
}

PREFIXES = (
    'task', 'family', 'grid', 'random', 'algorithm', 'solver', 'H',
    'callbacks',
)

# keys that do not change any result
RUNTIME_KEYS = {'out', 'workers', 'block_size', 'verbose'}

DEFAULTS = {
    'task': 'bai',
    'family': 'gaussian',
    'algorithm': 'uniform',
    'n_reps': 10000,
    'workers': None,
    'block_size': 10000,
    'H': 'auto',
    'compare': False,
    'name': 'results',
    'verbose': 0,
}


def resolve(name, registry, kind):
    """Return the registered component ``name`` or import it if it is
    a dotted name.

    """
    if not isinstance(name, str):
        return name
    if name in registry:
        return registry[name]
    if '.' in name:
        module, attr = name.rsplit('.', 1)
        try:
            return getattr(import_module(module), attr)
        except (ImportError, AttributeError) as exc:
            raise ConfigError("Cannot import {} {!r}: {}".format(
                kind, name, exc)) from exc
    raise ConfigError("Unknown {} {!r}, expected one of {}.".format(
        kind, name, ', '.join(sorted(registry))))


class ExperimentConfig:
    """A validated experiment config.

    Parameters
    ----------
    params : dict
      The flat config. See the module documentation and
      ``docs/user/config.rst`` for the keys.

    Attributes
    ----------
    task_ : Task

    family_ : ExponentialFamily

    instances_ : list of BanditInstance

    algorithm_ : Algorithm or None
      Only built for simulations.

    """
    def __init__(self, params):
        self.params = dict(DEFAULTS)
        self.params.update(params)

    @classmethod
    def from_file(cls, f):
        """Read a config from a JSON file.

        Raises
        ------
        ConfigError
          If the file cannot be read or is not a JSON object.

        """
        try:
            with open_file_like(f, 'r') as fp:
                params = json.load(fp)
        except (OSError, ValueError) as exc:
            raise ConfigError("Cannot read config {!r}: {}".format(
                f, exc)) from exc
        if not isinstance(params, dict):
            raise ConfigError("A config must be a JSON object.")
        return cls(params)

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        return self.params.get(key, default)

    def get_params_for(self, prefix):
        return params_for(prefix, self.params)

    def override(self, **kwargs):
        """Set the keys of ``kwargs`` whose value is not None, as done
        for command line flags.

        """
        self.params.update(
            {key: val for key, val in kwargs.items() if val is not None})
        return self

    def to_dict(self):
        return dict(self.params)

    @property
    def hash(self):
        """Hash of the keys that can change results."""
        return config_hash({
            key: val for key, val in self.params.items()
            if key not in RUNTIME_KEYS})

    def _check_keys(self):
        for key in self.params:
            if key in KEYS:
                continue
            if '__' in key and key.split('__', 1)[0] in PREFIXES:
                continue
            raise ConfigError("Unknown config key {!r}.".format(key))

    def _build_family(self):
        cls = resolve(self['family'], FAMILIES, 'family')
        return cls(**self.get_params_for('family'))

    def _build_task(self):
        cls = resolve(self['task'], TASKS, 'task')
        return cls(**self.get_params_for('task'))

    def _build_instances(self, family):
        instances = []
        if 'instance' in self.params:
            instances.append(BanditInstance(self['instance'], family))
        for means in self.get('instances') or []:
            instances.append(BanditInstance(means, family))

        grid = self.get_params_for('grid')
        if grid:
            instances.extend(make_two_arm_grid(
                grid['low'], grid['high'], grid['n'], family=family,
                off_diagonal=grid.get('off_diagonal', True)))

        random = self.get_params_for('random')
        if random:
            rng = np.random.default_rng(random.get('seed', 0))
            instances.extend(
                random_instance(
                    rng, family=family, K=random.get('K', 2),
                    low=random.get('low'), high=random.get('high'),
                    min_gap=random.get('min_gap', 1e-3))
                for _ in range(random['n']))

        if not instances:
            raise ConfigError(
                "The config defines no instance; use 'instance', "
                "'instances', 'grid__*' or 'random__*'.")
        return instances

    def _build_algorithm(self):
        cls = resolve(self['algorithm'], ALGORITHMS, 'algorithm')
        return cls(**self.get_params_for('algorithm'))

    @property
    def T_list(self):
        if 'T_list' in self.params:
            return [int(T) for T in self['T_list']]
        if 'T' in self.params:
            return [int(self['T'])]
        return []

    def validate(self, command):
        """Build and check all components used by ``command`` without
        running any computation.

        Raises
        ------
        ConfigError
          If a key is unknown, a component cannot be built or a
          combination is not supported.

        """
        self._check_keys()
        if self['H'] not in H_SELECTORS:
            raise ConfigError("Unknown H selector {!r}, expected one of "
                              "{}.".format(self['H'], ', '.join(H_SELECTORS)))
        try:
            self.family_ = self._build_family()
            self.task_ = self._build_task()
            self.instances_ = self._build_instances(self.family_)
            for instance in self.instances_:
                correct_answer(self.task_, instance)
                if isinstance(self.task_, HalfSpace):
                    self.task_.normalized(instance)
            self.algorithm_ = None
            if command == 'simulate':
                self._validate_simulation()
        except ConfigError:
            raise
        except (BudgetIdException, TypeError, ValueError, KeyError) as exc:
            raise ConfigError("Invalid config: {}".format(exc)) from exc

        selector = self['H']
        if selector == 'h_delta' and not (
                isinstance(self.task_, BAI) and self.family_ == Gaussian(1.0)):
            raise ConfigError(
                "H='h_delta' needs BAI with unit-variance Gaussian arms.")
        if selector == 'grid' and (
                isinstance(self.task_, HalfSpace)
                or max(inst.n_arms for inst in self.instances_) > 3):
            raise ConfigError(
                "H='grid' supports K <= 3 and no half-space task.")
        return self

    def _validate_simulation(self):
        if self.get('seed') is None:
            raise ConfigError("Simulations need a 'seed'.")
        T_list = self.T_list
        if not T_list:
            raise ConfigError("Simulations need 'T' or 'T_list'.")
        if any(b <= a for a, b in zip(T_list, T_list[1:])):
            raise ConfigError("'T_list' must be increasing.")
        if int(self['n_reps']) < 1:
            raise ConfigError("'n_reps' must be at least 1.")
        self.algorithm_ = self._build_algorithm()
        for instance in self.instances_:
            for T in T_list:
                self.algorithm_.check(self.task_, instance, T)

    def default_workers(self):
        workers = self['workers']
        if workers in (None, 0):
            return os.cpu_count() or 1
        return int(workers)

    def selector_params(self):
        """Keyword arguments of the function behind the H selector."""
        if self['H'] == 'grid':
            return self.get_params_for('H')
        if self['H'] in ('h_delta', 'none'):
            return {}
        return self.get_params_for('solver')

    def callback_params(self):
        """The ``callbacks__<name>__<param>`` keys of the simulator."""
        return {key: val for key, val in self.params.items()
                if key.startswith('callbacks__')}
