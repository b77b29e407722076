"""Contains shared fixtures, hooks, etc."""

import numpy as np
import pytest


###################
# shared fixtures #
###################


@pytest.fixture(autouse=True)
def seeds_fixed():
    np.random.seed(0)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def gaussian():
    from budgetid.families import Gaussian
    return Gaussian(1.0)


@pytest.fixture
def bernoulli():
    from budgetid.families import Bernoulli
    return Bernoulli()


@pytest.fixture
def gaussian_pair(gaussian):
    """Two unit-variance Gaussian arms, the first one best."""
    from budgetid.tasks import BanditInstance
    return BanditInstance([1.0, 0.0], gaussian)


@pytest.fixture
def bernoulli_pair(bernoulli):
    """The reference Bernoulli instance of the simulations."""
    from budgetid.tasks import BanditInstance
    return BanditInstance([0.6, 0.4], bernoulli)


@pytest.fixture
def gaussian_three(gaussian):
    from budgetid.tasks import BanditInstance
    return BanditInstance([1.0, 0.5, 0.0], gaussian)


@pytest.fixture
def bai():
    from budgetid.tasks import BAI
    return BAI()
