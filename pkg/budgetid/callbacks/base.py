""" Basic callback definition. """

from sklearn.base import BaseEstimator


__all__ = ['Callback']


class Callback:
    """Base class for callbacks of the :class:`budgetid.simulator.Simulator`.

    A subclass may override any of the ``on_...`` methods; the ones it
    leaves alone have no effect. A run visits every budget ``T`` of a
    rate curve (a *point*), and every point is made of replication
    blocks.

    Classes that inherit from this also gain the ``get_params`` and
    ``set_params`` method.

    """
    def initialize(self):
        """(Re-)Set the initial state of the callback, e.g. counters
        that must not leak from one run into the next.

        This method should return self.

        """
        return self

    def on_run_begin(self, sim, T_list=None, **kwargs):
        """Called before the first point of a run."""

    def on_run_end(self, sim, T_list=None, **kwargs):
        """Called after the last point of a run."""

    def on_point_begin(self, sim, T=None, n_blocks=None, **kwargs):
        """Called before the replications of budget ``T`` start."""

    def on_point_end(self, sim, T=None, result=None, **kwargs):
        """Called once the :class:`SimResult` of budget ``T`` is known."""

    def on_block_end(self, sim, block=None, errors=None, replications=None,
                     **kwargs):
        """Called whenever a replication block has been merged."""

    def _get_param_names(self):
        return (key for key in self.__dict__ if not key.endswith('_'))

    def get_params(self, deep=True):
        return BaseEstimator.get_params(self, deep=deep)

    def set_params(self, **params):
        BaseEstimator.set_params(self, **params)
