import pytest

from qftlab.plant import NOMINAL_PARAMS, UncertaintySet, make_instance, sample_plants
from qftlab.shaping import reference_controller


@pytest.fixture(scope="session")
def nominal():
    return make_instance(NOMINAL_PARAMS, is_nominal=True)


@pytest.fixture(scope="session")
def uncertainty():
    return UncertaintySet()


@pytest.fixture(scope="session")
def corner_plants(uncertainty):
    return sample_plants(uncertainty, 2)


@pytest.fixture(scope="session")
def grid_plants(uncertainty):
    return sample_plants(uncertainty, 3)


@pytest.fixture(scope="session")
def ref_design():
    return reference_controller()
