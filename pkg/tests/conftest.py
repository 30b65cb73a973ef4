import numpy as np
import pytest

from feedopt.config import load_config
from feedopt.dynamics import DiscreteTransferFunction
from feedopt.geometry import CirclePath


@pytest.fixture(scope="session")
def printer_config():
    return load_config("printer_circle")


@pytest.fixture(scope="session")
def table1_config():
    return load_config("table1")


@pytest.fixture(scope="session")
def printer_models(printer_config):
    return printer_config.build_models()


@pytest.fixture(scope="session")
def circle():
    return CirclePath(center=(0.0, 0.0), radius=5.0, start_angle=0.0, sweep=2.0 * np.pi)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture()
def delay_tf():
    return DiscreteTransferFunction(num=[1.0], den=[1.0, 0.0], sample_time=1e-3)


@pytest.fixture()
def identity_tf():
    return DiscreteTransferFunction(num=[1.0], den=[1.0], sample_time=1e-3)
