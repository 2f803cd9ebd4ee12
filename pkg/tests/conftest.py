import numpy as np
import pytest
from hypothesis import settings

from pairspin.pulse import PulseConfig, integration_window

settings.register_profile("pairspin", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("pairspin")

# filled by tests/test_acceptance.py, printed at the end of the session
CRITERIA = {}


def sauter_pulse():
    return PulseConfig("SauterLike", E0=0.5, tau0=3.0, t0=3.0, sigma=0.8)


def strong_sauter_pulse():
    return PulseConfig("SauterLike", E0=1.5, tau0=3.0, t0=3.0, sigma=0.0)


def oscillating_pulse(omega=0.5):
    return PulseConfig("Oscillating", E0=0.5, tau0=3.0, t0=3.0, sigma=0.8, omega=omega)


def circular_pulse():
    return PulseConfig("Elliptic", E0=0.5, tau0=3.0, t0=3.0, sigma=0.8, omega=0.5,
                       delta=np.pi / 4, eps2=(0.0, 1.0, 0.0))


@pytest.fixture(scope="session")
def sauter():
    pulse = sauter_pulse()
    return pulse, integration_window(pulse)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[number])
