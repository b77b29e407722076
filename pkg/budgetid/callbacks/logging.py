""" Callbacks for timing, printing and progress information."""

import sys
import time
from numbers import Number

import tqdm
from tabulate import tabulate

from budgetid.callbacks.base import Callback


__all__ = ['PointTimer', 'PrintLog', 'ProgressBar']


def print_stderr(text):
    """Sink that prints to standard error."""
    print(text, file=sys.stderr)


class PointTimer(Callback):
    """Measures the duration of each rate-curve point and writes it to
    the history with the name ``dur``.

    """
    def __init__(self):
        self.point_start_time_ = None

    def on_point_begin(self, sim, **kwargs):
        self.point_start_time_ = time.time()

    def on_point_end(self, sim, **kwargs):
        sim.history_.record('dur', time.time() - self.point_start_time_)


class PrintLog(Callback):
    """Print the latest row of the simulator's history as a table.

    The first call prints the header, every further call appends one
    line, so a rate curve builds up as a single table. ``'T'`` comes
    first and ``'dur'`` last; all other keys are sorted.

    Parameters
    ----------
    keys_ignored : str or list of str (default=None)
      Key or list of keys that should not be part of the printed
      table. ``'blocks'`` is always ignored.

    sink : callable (default=print_stderr)
      The target that the output string is sent to. Standard output
      is reserved for data, so tables go to standard error.

    tablefmt : str (default='simple')
      The format of the table. See the documentation of the ``tabulate``
      package for more detail.

    floatfmt : str (default='.4g')
      The number formatting. See the documentation of the ``tabulate``
      package for more details.

    """
    def __init__(
            self,
            keys_ignored=None,
            sink=print_stderr,
            tablefmt='simple',
            floatfmt='.4g',
    ):
        self.keys_ignored = keys_ignored
        self.sink = sink
        self.tablefmt = tablefmt
        self.floatfmt = floatfmt

    def initialize(self):
        self.first_iteration_ = True

        keys_ignored = self.keys_ignored
        if isinstance(keys_ignored, str):
            keys_ignored = [keys_ignored]
        self.keys_ignored_ = set(keys_ignored or [])
        self.keys_ignored_.add('blocks')
        return self

    def _sorted_keys(self, keys):
        middle = sorted(
            key for key in keys
            if key not in self.keys_ignored_ and key not in ('T', 'dur'))
        head = ['T'] if 'T' in keys and 'T' not in self.keys_ignored_ else []
        tail = ['dur'] if 'dur' in keys and 'dur' not in self.keys_ignored_ else []
        return head + middle + tail

    def format_value(self, value):
        if value is None:
            return ''
        if isinstance(value, bool):
            return '+' if value else ''
        if not isinstance(value, Number):
            return value
        if float(value).is_integer():
            return '{}'.format(value)
        return '{:{}}'.format(value, self.floatfmt)

    def table(self, row):
        headers = self._sorted_keys(row.keys())
        formatted = [self.format_value(row[key]) for key in headers]
        return tabulate(
            [formatted],
            headers=headers,
            tablefmt=self.tablefmt,
            stralign='right',
        )

    # pylint: disable=unused-argument
    def on_point_end(self, sim, **kwargs):
        if not sim.verbose:
            return

        tabulated = self.table(sim.history_[-1])
        if self.first_iteration_:
            header, lines = tabulated.split('\n', 2)[:2]
            self.sink(header)
            self.sink(lines)
            self.first_iteration_ = False
        self.sink(tabulated.rsplit('\n', 1)[-1])


class ProgressBar(Callback):
    """Display a progress bar over the replication blocks of each
    point.

    The bar is written to standard error by ``tqdm`` and erased once
    the point is completed.

    Parameters
    ----------
    postfix_keys : list of str (default=['errors'])
      Block-level history values shown next to the bar. They must be
      accessible via ``sim.history_[-1, 'blocks', -1, key]``.

    """
    def __init__(self, postfix_keys=None):
        self.postfix_keys = postfix_keys or ['errors']

    def _get_postfix_dict(self, sim):
        postfix = {}
        for key in self.postfix_keys:
            try:
                postfix[key] = sim.history_[-1, 'blocks', -1, key]
            except (KeyError, IndexError):
                pass
        return postfix

    # pylint: disable=attribute-defined-outside-init
    def on_point_begin(self, sim, T=None, n_blocks=None, **kwargs):
        self.pbar_ = tqdm.tqdm(
            total=n_blocks, leave=False, desc='T={}'.format(T),
            file=sys.stderr)

    def on_block_end(self, sim, **kwargs):
        self.pbar_.set_postfix(self._get_postfix_dict(sim), refresh=False)
        self.pbar_.update()

    def on_point_end(self, sim, **kwargs):
        self.pbar_.close()

    def __getstate__(self):
        state = self.__dict__.copy()
        state.pop('pbar_', None)
        return state
