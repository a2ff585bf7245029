import pytest

from hetnet154 import devices, simulator


@pytest.fixture(scope="session")
def pset():
    return devices.default_profiles()


@pytest.fixture(scope="session")
def default_scenario(pset):
    return simulator.Scenario(profiles=pset)


@pytest.fixture(scope="session")
def default_records(default_scenario):
    """One full default-matrix run, shared by everything downstream."""
    return simulator.run_scenario(default_scenario)
