import math

import pytest

from rswe_triads.spectral_core import GridSpec, PhysicalParams

ACCEPTANCE_LINES = []


@pytest.fixture
def nd_params():
    """Standard-form parameters with epsilon = 0.1 (f = c = 10)."""
    return PhysicalParams.nondimensional(0.1)


@pytest.fixture
def grid32():
    return GridSpec.square(32, 2 * math.pi)


@pytest.fixture
def report():
    """Record a one-line pass/fail verdict for the acceptance summary."""

    def _report(number, ok, detail):
        ACCEPTANCE_LINES.append((number, f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"))

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES, key=lambda x: str(x[0]).zfill(3)):
            terminalreporter.write_line(line)
