import pytest

from resonancelab.duhamel import preset_scenario
from resonancelab.spectral_core import Grid


@pytest.fixture(scope="session")
def gap_scenario():
    """Gamma-free scenario, support [0, 1]^2."""
    return preset_scenario("gap", t_max=100.0)


@pytest.fixture(scope="session")
def gap_off_diagonal():
    """Gap triple with a support that avoids xi = eta, so Delta is empty there too."""
    return preset_scenario("gap", t_max=50.0, center=(1.0, -1.0), radius=0.3)


@pytest.fixture(scope="session")
def shifted_scenario():
    return preset_scenario("schrodinger_shifted", t_max=20.0)


@pytest.fixture(scope="session")
def shifted_long():
    """Default shifted scenario with a horizon of t = 1000."""
    return preset_scenario("schrodinger_shifted", t_max=1000.0)


@pytest.fixture(scope="session")
def wideband_shifted():
    """Shifted scenario whose resonant packets disperse within a few time units."""
    return preset_scenario("schrodinger_shifted", t_max=1000.0, width=1.0, radius=1.0)


@pytest.fixture
def small_grid():
    return Grid(256, 64.0)
