"""
Shared fixtures and the --runslow switch for full-length runs.
"""

import numpy as np
import pytest

from app.core.propagator import calibrate_step
from app.physics.models import DriveWaveform, ModelParams, PropagatorConfig


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run full-length tests")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def default_params():
    return ModelParams()


@pytest.fixture(scope="session")
def cosine_drive():
    return DriveWaveform()


@pytest.fixture(scope="session")
def calibrated(default_params, cosine_drive):
    """Laguerre settings calibrated for the default run."""
    return calibrate_step(default_params, cosine_drive, PropagatorConfig(), seed=0)
