"""budgetid base imports"""

import pkg_resources

from .history import History
from .families import Bernoulli
from .families import Gaussian
from .tasks import BAI
from .tasks import BanditInstance
from .tasks import HalfSpace
from .tasks import Positivity
from .tasks import Thresholding
from .difficulty import oracle_difficulty_sp
from .algorithms import StaticProportions
from .algorithms import SuccessiveHalving
from .algorithms import SuccessiveRejects
from .algorithms import Uniform
from .simulator import Simulator
from . import bounds
from . import callbacks


__all__ = [
    'BAI',
    'BanditInstance',
    'Bernoulli',
    'Gaussian',
    'HalfSpace',
    'History',
    'Positivity',
    'Simulator',
    'StaticProportions',
    'SuccessiveHalving',
    'SuccessiveRejects',
    'Thresholding',
    'Uniform',
    'bounds',
    'callbacks',
    'oracle_difficulty_sp',
]


try:
    __version__ = pkg_resources.get_distribution('budgetid').version
except:  # pylint: disable=bare-except
    __version__ = 'n/a'
