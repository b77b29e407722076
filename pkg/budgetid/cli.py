"""Command line interface, built with fire.

.. code:: bash

    budgetid difficulty --config gaussian_bai.json
    budgetid bound bernoulli-two-arm --x-decades 3:12
    budgetid bound gaussian-logk --K 10,100,1000
    budgetid simulate --config uniform.json --seed 7 --workers 4 --out results/
    budgetid reproduce sp-rate-ldp --out results/

Tables go to standard output as CSV unless ``--out`` names a
directory; then a CSV file, a JSON file and a manifest are written
there, all at once after the computation succeeded. Progress and
messages go to standard error.

Exit codes are 0 on success, 2 for usage and config errors and 3 if a
numerical method failed.

"""

import csv
import io
import json
import os
import sys

import fire

import budgetid
from budgetid.callbacks import ProgressBar
from budgetid.config import ExperimentConfig
from budgetid.config import RUNTIME_KEYS
from budgetid.exceptions import BudgetIdException
from budgetid.exceptions import ConfigError
from budgetid.exceptions import OptimizerFailure
from budgetid.experiments import BOUNDS
from budgetid.experiments import BUNDLES
from budgetid.experiments import difficulty_table
from budgetid.experiments import simulation_table
from budgetid.utils import config_hash
from budgetid.utils import format_float
from budgetid.utils import to_jsonable


__all__ = ['main']

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def render_csv(table, meta):
    """CSV text of ``table`` with LF line endings; every row carries the
    config hash and the seed.

    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(table.columns + ['config_hash', 'seed'])
    for row in table.rows:
        writer.writerow(
            [format_float(row[key]) for key in table.columns]
            + [meta['config_hash'], format_float(meta['seed'])])
    return buf.getvalue()


def render_json(table, meta):
    document = dict(meta, columns=table.columns, rows=table.rows)
    return json.dumps(to_jsonable(document), indent=2) + '\n'


def emit(table, config, seed, command, out=None, name='results'):
    """Write ``table`` to standard output or to files in ``out``.

    All contents are rendered before the first file is opened, so a
    failure never leaves partial outputs behind. Keys that do not
    change results are left out of the hash and the manifest.

    """
    config = {key: val for key, val in config.items()
              if key not in RUNTIME_KEYS}
    meta = {
        'command': command,
        'config_hash': config_hash(config),
        'seed': seed,
        'version': budgetid.__version__,
    }
    csv_text = render_csv(table, meta)
    if out is None:
        sys.stdout.write(csv_text)
        return

    files = {
        name + '.csv': csv_text,
        name + '.json': render_json(table, meta),
    }
    manifest = dict(meta, config=config, files=sorted(files))
    files['manifest.json'] = json.dumps(
        to_jsonable(manifest), indent=2, sort_keys=True) + '\n'

    os.makedirs(out, exist_ok=True)
    for filename, text in files.items():
        with open(os.path.join(out, filename), 'w', encoding='utf-8',
                  newline='\n') as f:
            f.write(text)


def _load(config, command, **overrides):
    if config is None:
        raise ConfigError("The {} command needs --config.".format(command))
    cfg = ExperimentConfig.from_file(config)
    cfg.override(**overrides)
    return cfg.validate(command)


def difficulty(config=None, seed=None, workers=None, out=None):
    """Oracle difficulty of every instance of a config.

    Parameters
    ----------
    config : str
      Path of a JSON config.

    seed : int or None (default=None)
      Overrides the seed of the config.

    workers : int or None (default=None)
      Unused by this command; accepted for uniformity.

    out : str or None (default=None)
      Output directory; standard output if None.

    """
    cfg = _load(config, 'difficulty', seed=seed, workers=workers, out=out)
    table = difficulty_table(cfg)
    emit(table, cfg.to_dict(), cfg.get('seed'), 'difficulty',
         out=cfg.get('out'), name=cfg['name'])


def bound(name, out=None, **options):
    """Evaluate a lower bound construction.

    Parameters
    ----------
    name : str
      One of ``bernoulli-two-arm``, ``gaussian-logk``, ``positivity``,
      ``gaussian-two-arm`` and ``halfspace``.

    out : str or None (default=None)
      Output directory; standard output if None.

    options : dict
      Parameters of the bound, e.g. ``--x-decades 3:12``, ``--K 5`` or
      ``--sweep-ell``.

    """
    if name not in BOUNDS:
        raise ConfigError("Unknown bound {!r}, expected one of {}.".format(
            name, ', '.join(sorted(BOUNDS))))
    options = {key: _parse_list(val) for key, val in options.items()}
    try:
        table = BOUNDS[name](**options)
    except TypeError as exc:
        raise ConfigError("Invalid options for bound {!r}: {}".format(
            name, exc)) from exc
    config = dict(options, bound=name)
    emit(table, config, None, 'bound', out=out, name=name)


def _parse_list(value):
    """Fire leaves ``1,2,3`` with spaces or mixed types as a string."""
    if isinstance(value, str) and ',' in value:
        return [float(v) if '.' in v or 'e' in v else int(v)
                for v in value.split(',')]
    if isinstance(value, tuple):
        return list(value)
    return value


def simulate(config=None, seed=None, workers=None, out=None, verbose=None):
    """Estimate error probabilities by simulation.

    Parameters
    ----------
    config : str
      Path of a JSON config; it must define a seed unless ``--seed`` is
      given.

    seed : int or None (default=None)
      Overrides the master seed of the config.

    workers : int or None (default=None)
      Number of parallel workers; all cores by default. Results do not
      depend on it.

    out : str or None (default=None)
      Output directory; standard output if None.

    verbose : int or None (default=None)
      Print a table per budget and a progress bar to standard error.

    """
    cfg = _load(config, 'simulate', seed=seed, workers=workers, out=out,
                verbose=verbose)
    callbacks = [ProgressBar()] if cfg['verbose'] else None
    table = simulation_table(cfg, callbacks=callbacks)
    emit(table, cfg.to_dict(), cfg['seed'], 'simulate', out=cfg.get('out'),
         name=cfg['name'])


def reproduce(name, out=None, seed=0, workers=None, n_reps=None):
    """Run a named experiment bundle.

    Parameters
    ----------
    name : str
      One of ``bernoulli-limit``, ``gaussian-logk``, ``positivity-k``,
      ``halfspace-one`` and ``sp-rate-ldp``.

    out : str or None (default=None)
      Output directory; standard output if None.

    seed : int (default=0)
      Master seed of the simulations.

    workers : int or None (default=None)
      Number of parallel workers.

    n_reps : int or None (default=None)
      Replications per budget of simulation bundles.

    """
    if name not in BUNDLES:
        raise ConfigError(
            "Unknown experiment {!r}. Valid names are: {}.".format(
                name, ', '.join(sorted(BUNDLES))))
    params, table = BUNDLES[name](seed, workers, n_reps)
    config = dict(params, bundle=name)
    emit(table, config, seed, 'reproduce', out=out, name=name)


COMMANDS = {
    'difficulty': difficulty,
    'bound': bound,
    'simulate': simulate,
    'reproduce': reproduce,
}


def main(argv=None):
    """Run the command line and return its exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        fire.Fire(COMMANDS, command=argv, name='budgetid')
    except fire.core.FireExit as exc:
        return exc.code
    except OptimizerFailure as exc:
        print("budgetid: numerical failure: {}".format(exc), file=sys.stderr)
        return EXIT_NUMERICAL
    except BudgetIdException as exc:
        print("budgetid: {}".format(exc), file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
