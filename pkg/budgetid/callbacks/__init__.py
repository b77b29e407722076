"""This module serves to elevate callbacks in submodules to the
budgetid.callbacks namespace. Remember to define `__all__` in each
submodule.

"""

# pylint: disable=wildcard-import

from .base import *
from .logging import *


__all__ = [
    'Callback',
    'PointTimer',
    'PrintLog',
    'ProgressBar',
]
