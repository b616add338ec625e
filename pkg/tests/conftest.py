import math

import numpy as np
import pytest

from concurrence_lab.state import PureBipartiteState

ACCEPTANCE_LINES = []


def theta_state(theta):
    return PureBipartiteState(2, 2, [0.0, math.cos(theta), math.sin(theta), 0.0])


def random_rho(d, rng):
    """Full-rank random density matrix built without the package's oracle."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return m / np.trace(m).real


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
