import pytest

from honeycomb_control.fermion import ModelParams, assemble_coupling, trivial_gauge
from honeycomb_control.lattice import build_lattice

_ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def report(number: int, title: str, passed: bool, detail: str):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title} | {detail}"
        print(line)
        _ACCEPTANCE_LINES.append(line)
        assert passed, line

    return report


@pytest.fixture(scope="session")
def hexagon():
    return build_lattice(1, 1)


@pytest.fixture(scope="session")
def ten():
    return build_lattice(1, 2)


@pytest.fixture(scope="session")
def hex_model(hexagon):
    return assemble_coupling(hexagon, trivial_gauge(hexagon), ModelParams(), hexagon.central_link())


@pytest.fixture(scope="session")
def ten_model(ten):
    return assemble_coupling(ten, trivial_gauge(ten), ModelParams(), ten.central_link())
