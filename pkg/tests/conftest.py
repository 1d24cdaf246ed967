import numpy as np
import pytest

from kastap import ClutterScenario, RadarConfig, ground_truth_covariance

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(lines):
        terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Record one pass/fail line for an acceptance criterion and assert it."""
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config.stash[_ACCEPTANCE_KEY].append(line)
        assert ok, line
    return record


@pytest.fixture(scope="session")
def cfg():
    return RadarConfig.nominal()


@pytest.fixture(scope="session")
def scenario():
    return ClutterScenario()


@pytest.fixture(scope="session")
def icm_scenario():
    return ClutterScenario(icm_sigma_v=0.5)


@pytest.fixture(scope="session")
def truth(scenario):
    return ground_truth_covariance(scenario)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
