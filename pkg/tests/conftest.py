import warnings

import numpy as np
import pytest

from lightcone import Grid, ModeIndex


@pytest.fixture(scope="session")
def grid():
    return Grid(1024, 16.0)


@pytest.fixture(scope="session")
def rad3():
    return ModeIndex(3, 0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _quiet_origin_warning():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*frequency origin.*")
        yield


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
