import numpy as np
import pytest
from hypothesis import HealthCheck, settings

# numba compilation makes first calls slow; hypothesis deadlines would misfire
settings.register_profile(
    "rxnsim",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("rxnsim")


@pytest.fixture(scope="session")
def crazy_clock():
    from rxnsim.builtins import crazy_clock

    return crazy_clock()


@pytest.fixture(scope="session")
def epidemic():
    from rxnsim.builtins import epidemic

    return epidemic()


@pytest.fixture(scope="session")
def viral():
    from rxnsim.builtins import viral

    return viral()


@pytest.fixture(scope="session")
def transcription():
    from rxnsim.builtins import transcription

    return transcription()


@pytest.fixture(scope="session")
def switch_clock():
    from rxnsim.builtins import crazy_clock_switch

    return crazy_clock_switch()


@pytest.fixture(scope="session")
def abc_model():
    from rxnsim.builtins import abc

    return abc()


def pytest_addoption(parser):
    parser.addoption(
        "--quick-acceptance",
        action="store_true",
        default=False,
        help="run the acceptance suite with reduced ensemble sizes (calibration only)",
    )


@pytest.fixture(scope="session")
def acceptance_scale(request):
    """Run-count divisor: 1 for the real acceptance gate."""
    return 10 if request.config.getoption("--quick-acceptance") else 1


@pytest.fixture(autouse=True)
def _np_errstate():
    with np.errstate(over="ignore", invalid="ignore"):
        yield
