"""Contains the history class.

A :class:`History` is a list of rows (dicts). Each row may hold a
list of ``'blocks'``, which are dicts themselves. The simulator adds
one row per rate-curve point and one block per replication block; the
maximin solver adds one row per iteration.

"""

import json

from budgetid.utils import open_file_like


__all__ = ['History']


def _select(obj, keys):
    """Walk ``keys`` into a nested structure of lists and dicts.

    On a list, an integer picks one item and a slice maps the rest of
    the keys over the selected items, silently dropping items that
    lack them. On a dict, a str picks a value and a tuple or list of
    str picks several values at once.

    """
    if not keys:
        return obj

    key, rest = keys[0], keys[1:]
    if isinstance(obj, list):
        if isinstance(key, slice):
            selected = []
            for item in obj[key]:
                try:
                    selected.append(_select(item, rest))
                except KeyError:
                    continue
            if rest and obj[key] and not selected:
                raise KeyError("Key {!r} was not found in history.".format(
                    rest[0]))
            return selected
        if isinstance(key, str):
            return _select(obj, (slice(None),) + keys)
        return _select(obj[key], rest)

    if isinstance(key, (tuple, list)):
        return _select(tuple(obj[k] for k in key), rest)
    return _select(obj[key], rest)


class History(list):
    """History contains the information about the steps of a run.

    In addition to the usual list indexing, a history supports
    indexing across rows and into the nested blocks:

    >>> history = History()
    >>> history.new_row(T=100)
    >>> history.record('p_hat', 0.02)
    >>> history.new_block()
    >>> history.record_block('errors', 12)
    >>> history[:, 'p_hat']
    [0.02]
    >>> history[-1, 'blocks', :, 'errors']
    [12]
    >>> history[-1, ('T', 'p_hat')]
    (100, 0.02)

    """

    def new_row(self, **kwargs):
        """Register a new row, optionally filled with ``kwargs``."""
        row = {'blocks': []}
        row.update(kwargs)
        self.append(row)

    def new_block(self):
        """Register a new block in the current row."""
        self[-1]['blocks'].append({})

    def record(self, attr, value):
        """Add a new value to the given column of the current row."""
        msg = "Call new_row before recording any values."
        if not self:
            raise ValueError(msg)
        self[-1][attr] = value

    def record_block(self, attr, value):
        """Add a new value to the given column of the current block."""
        if not self or not self[-1]['blocks']:
            raise ValueError("Call new_block before recording block values.")
        self[-1]['blocks'][-1][attr] = value

    def to_list(self):
        """Return the history as a native python list."""
        return list(self)

    @classmethod
    def from_file(cls, f):
        """Load the history of a run from a json file.

        Parameters
        ----------
        f : file-like object or str

        """
        with open_file_like(f, 'r') as fp:
            return cls(json.load(fp))

    def to_file(self, f):
        """Saves the history as a json file.

        Parameters
        ----------
        f : file-like object or str

        """
        with open_file_like(f, 'w') as fp:
            json.dump(self.to_list(), fp)

    def __getitem__(self, i):
        if not isinstance(i, tuple):
            return super().__getitem__(i)
        return _select(list(self), i)
