import math

import pytest

from hetnet_hotspot.config import Config
from hetnet_hotspot.linkbudget import LinkCurve, RadioParams, build_network_model

# frozen reference numbers computed with mpmath / scipy (see test modules)
R_UNIT = 0.525037567904332


@pytest.fixture(scope="session")
def model():
    return build_network_model(RadioParams())


@pytest.fixture(scope="session")
def curve():
    return LinkCurve()


@pytest.fixture(scope="session")
def cfg():
    return Config()


@pytest.fixture
def theta60():
    return math.pi / 3
