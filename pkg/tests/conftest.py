import os
from pathlib import Path

import numpy as np
import pytest

from curvcanon import gram_matrix, hyperelliptic, plane_quartic

CURVES = Path(__file__).resolve().parent.parent / "curves"

FERMAT = [-1] + [0] * 9 + [1, 0, 0, 0, 1]


def roots_minus_one(n):
    return [-1] + [0] * (n - 1) + [1]


@pytest.fixture(scope="session")
def x6():
    return hyperelliptic(roots_minus_one(6))


@pytest.fixture(scope="session")
def x8():
    return hyperelliptic(roots_minus_one(8))


@pytest.fixture(scope="session")
def x5():
    return hyperelliptic(roots_minus_one(5))


@pytest.fixture(scope="session")
def fermat():
    return plane_quartic(FERMAT)


@pytest.fixture(scope="session")
def generic_quartic():
    rng = np.random.default_rng(0)
    return plane_quartic(list(rng.normal(size=15) + 1j * rng.normal(size=15)))


@pytest.fixture(scope="session")
def gram_x6(x6):
    return gram_matrix(x6)


@pytest.fixture(scope="session")
def gram_x8(x8):
    return gram_matrix(x8)


@pytest.fixture(scope="session")
def gram_x5(x5):
    return gram_matrix(x5)


@pytest.fixture(scope="session")
def gram_fermat(fermat):
    return gram_matrix(fermat)


@pytest.fixture(scope="session")
def gram_generic(generic_quartic):
    return gram_matrix(generic_quartic)


@pytest.fixture(scope="session")
def curve_dir():
    return CURVES


# acceptance summary lines, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


def pytest_configure(config):
    os.environ.setdefault("CURVCANON_THREADS", "1")
