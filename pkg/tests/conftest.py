import numpy as np
import pytest

from fraccalc import Grid, UNIT


@pytest.fixture
def grid256():
    return Grid(UNIT, 256)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
