import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ediscovery.core import OneDimInstance

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def line(positions, labels, ids=None) -> OneDimInstance:
    ids = np.arange(len(positions)) if ids is None else ids
    return OneDimInstance(ids, positions, labels)


@pytest.fixture
def four():
    # positions [1,2,3,4], labels [-,-,+,+]
    return line([1.0, 2.0, 3.0, 4.0], [-1, -1, 1, 1])


# criterion lines collected by test_acceptance and printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for s in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(s)
