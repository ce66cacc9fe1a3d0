import math

import numpy as np
import pytest

from qcoherence.core_model import ReservoirMode

RANGES = dict(omega=(0.5, 1.5), d_V=(0.8, 1.0), d_H=(0.2, 0.4))


def random_mode(rng):
    return ReservoirMode(rng.uniform(*RANGES["omega"]), rng.uniform(*RANGES["d_V"]),
                         rng.uniform(*RANGES["d_H"]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def diag():
    return 1 / math.sqrt(2)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
