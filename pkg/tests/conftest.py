import numpy as np
import pytest

from weingarten import Branch, Phi, SolverConfig, WeingartenParams, fixed_point_solve

# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


def unit_sphere(r):
    return 1.0 - np.sqrt(1.0 - r * r)


def radius2_sphere(r):
    return 2.0 - np.sqrt(4.0 - r * r)


@pytest.fixture(scope="session")
def unit_cap():
    """a=1, b=1, phi=3 solved on [0, 0.5]; the exact profile is the unit sphere."""
    return fixed_point_solve(WeingartenParams(1.0, 1.0), Phi.constant(3.0), Branch.PLUS,
                             SolverConfig(R=0.5, n=512))


@pytest.fixture(scope="session")
def mean_cap():
    return fixed_point_solve(WeingartenParams(1.0, 0.0), Phi.constant(1.0), Branch.PLUS,
                             SolverConfig(R=0.5, n=512, tol=1e-12))
