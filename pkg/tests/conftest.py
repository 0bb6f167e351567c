"""Shared fixtures: small solids with paired chain complexes and meshes."""
from __future__ import annotations

import numpy as np
import pytest

from brepscan import fixtures


@pytest.fixture(scope="session")
def box_pair():
    return fixtures.box(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def cylinder_pair():
    return fixtures.cylinder_solid(1.0, 2.0)


@pytest.fixture(scope="session")
def plate_pair():
    return fixtures.plate_with_hole(2.0, 2.0, 0.4, 0.08)


@pytest.fixture(scope="session")
def fillet_pair():
    return fixtures.filleted_block(1.0, 1.0, 1.0, 0.25)


@pytest.fixture(scope="session")
def rng():
    return np.random.Generator(np.random.PCG64(12345))


# One status line per acceptance criterion, echoed after the test summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
