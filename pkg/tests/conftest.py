import numpy as np
import pytest

from lattice_winding.lattice_walk import LatticeKind, WalkPath

# R U L U U R R D D R D D
FIXTURE_12 = np.array(
    [
        (0, 0), (1, 0), (1, 1), (0, 1), (0, 2), (0, 3), (1, 3),
        (2, 3), (2, 2), (2, 1), (3, 1), (3, 0), (3, -1),
    ],
    dtype=np.int64,
)

UNIT_SQUARE_CCW = np.array([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)], dtype=np.int64)


@pytest.fixture
def fixture_walk():
    return WalkPath.from_vertices(LatticeKind.SQUARE, FIXTURE_12)


@pytest.fixture
def square_walk():
    return WalkPath.from_vertices(LatticeKind.SQUARE, UNIT_SQUARE_CCW)


# acceptance criteria report one line each at the end of the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[2:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
