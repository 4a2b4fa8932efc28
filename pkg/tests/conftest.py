import math

import pytest
from hypothesis import HealthCheck, settings

from condswap.params import PhysicalParams

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def dispersive():
    """Dimensionless point with every dispersive ratio <= 0.03 (units of Delta)."""
    return PhysicalParams(g1=0.03, g2=0.03, omega_rabi1=1.0, omega_rabi2=1.0, delta1=1.0, delta2=1.0,
                          delta_two_photon=0.0, n1=1, n2=1)


@pytest.fixture
def trapped_ion():
    """Orders of magnitude of the trapped-ion example, Delta_eff forced to -2e9."""
    return PhysicalParams(g1=1e7, g2=1e7, omega_rabi1=1e9, omega_rabi2=1e9, delta1=1e9, delta2=1e9,
                          delta_two_photon=0.0, n1=100, n2=100)


SQRT2 = math.sqrt(2)
