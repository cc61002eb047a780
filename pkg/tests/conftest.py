import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from vvlab.thermo import GasLaw
from vvlab.viscosity import make_law

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture
def gas2():
    return GasLaw(2.0)


@pytest.fixture
def linear_law():
    return make_law("linear", 0.5, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one acceptance line and fail the test when the criterion fails."""

    def _record(label, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
