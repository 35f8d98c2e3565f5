import pytest
from hypothesis import HealthCheck, settings

from grandlp import Exponent, FiniteMap, FiniteSpace, Sampled

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.load_profile("default")


@pytest.fixture
def two_cycle():
    space = FiniteSpace.uniform(6)
    p = Exponent.sampled([2, 2, 2, 3, 3, 3])
    f = Sampled([3, 0, 0, 6, 0, 0])
    T = FiniteMap([1, 2, 0, 4, 5, 3])
    return space, f, T, p


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
