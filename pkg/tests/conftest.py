import pytest

from relaxshock.gas import GasModel, make_shock
from relaxshock.profile import solve_profile


@pytest.fixture(scope="session")
def model():
    return GasModel(5.0 / 3.0, 1.0, 1.0, 0.01)


@pytest.fixture(scope="session")
def shock(model):
    return make_shock(1.0, 0.0, 1.2, model)


@pytest.fixture(scope="session")
def profile(shock, model):
    return solve_profile(shock, model)


@pytest.fixture(scope="session")
def weak_profile(model):
    return solve_profile(make_shock(1.0, 0.0, 1.1, model), model)
