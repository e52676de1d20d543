import pytest

from acqtime.link_budget import TURBULENCE_PRESETS
from acqtime.scenario import DEFAULT_SCENARIO, URAD

SIGMA = 4 * URAD
TURBS = sorted(TURBULENCE_PRESETS)


@pytest.fixture
def scenario():
    return DEFAULT_SCENARIO


@pytest.fixture
def link():
    return DEFAULT_SCENARIO.link()


@pytest.fixture
def scan():
    return DEFAULT_SCENARIO.scan()


@pytest.fixture
def wide_pitch():
    """Turb.3, omega 20 urad, pitch 48 urad, reset 10 s, P_V 0.95."""
    return DEFAULT_SCENARIO.replace(pitch_d_urad=48.0)


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
