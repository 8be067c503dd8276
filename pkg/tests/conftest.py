import numpy as np
import pytest

from qdiss.density import DensityMatrix
from qdiss.sampling import random_density


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def rand_dm(rng, dims, rank=None):
    d = int(np.prod(dims))
    return DensityMatrix(random_density(rng, d, rank), tuple(dims))


# Acceptance lines collected by tests/test_acceptance.py, printed once at the end.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
