import numpy as np
import pytest

from pdmeasure.bloch import build_grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def grid():
    return build_grid(96, 48)


@pytest.fixture(scope="session")
def small_grid():
    return build_grid(16, 8)
