import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kqnm.geometry import BlackHoleParams, build_h

settings.register_profile(
    "kqnm", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("kqnm")

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def schw():
    return BlackHoleParams(1.0, 0.0)


@pytest.fixture(scope="session")
def schw_h(schw):
    return build_h(schw, 4.1, 3.6)


@pytest.fixture(scope="session")
def kerr05():
    return BlackHoleParams(1.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
