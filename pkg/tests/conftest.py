import numpy as np
import pytest

from gaugenet import ConstrainedSpec, TorusLattice, random_constrained, random_unconstrained

ACCEPTANCE_LINES = []


@pytest.fixture
def constrained_d4():
    lat = TorusLattice(4, 2, 1.0)
    return random_constrained(lat, ConstrainedSpec.from_eigenvalues([1, 1, -1, -1]), 11)


@pytest.fixture
def unconstrained_d2():
    return random_unconstrained(TorusLattice(2, 3, 0.7), 2, 1.0, 5)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def max_abs(x):
    return float(np.max(np.abs(x)))
