import numpy as np
import pytest

from grushin import RectilinearDomain

OMEGA = [(-2, -1, -3, 2), (-2, 1, 1, 2), (-2, 1, -1, 0), (-2, 1, -3, -2)]
OMEGA_PRIME = [(-2, 2, 1, 2), (-2, -1, -1, 2), (-2, 2, -1, 0), (1, 2, -3, 0), (-2, 2, -3, -2)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def omega():
    return RectilinearDomain.from_rects(OMEGA)


@pytest.fixture
def omega_prime():
    return RectilinearDomain.from_rects(OMEGA_PRIME)


@pytest.fixture
def box():
    return RectilinearDomain.from_rects([(-2, 2, -1, 1)])
