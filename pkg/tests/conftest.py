import numpy as np
import pytest

from satostats import arith


@pytest.fixture(scope="session")
def curves():
    return arith.bundled_curves()


@pytest.fixture(scope="session")
def curve_37a1(curves):
    return curves["37.a1"]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
