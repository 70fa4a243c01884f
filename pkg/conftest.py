import math

import pytest

from entanglement import PureState

# absolute tolerances shared by the suites
ENTRY_TOL = 1e-12
EIGEN_TOL = 1e-9


@pytest.fixture
def mes():
    """(|00> + |11> + |22>) / sqrt(3)"""
    return PureState.maximally_entangled()


@pytest.fixture
def esd_state():
    return PureState.esd_prone()


@pytest.fixture
def product_state():
    return PureState(1.0, 0.0, 0.0)


@pytest.fixture
def phased_state():
    return PureState(math.sqrt(0.1), math.sqrt(0.6) * complex(math.cos(0.7), math.sin(0.7)), math.sqrt(0.3))


@pytest.fixture
def tolerances():
    return {"entry": ENTRY_TOL, "eigen": EIGEN_TOL}
