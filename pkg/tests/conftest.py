import math

import pytest

from annulus_neumann import AnnulusGeometry, NonlinearSystem, RadiiLadder, SolveOptions, multi_solve

LADDER = RadiiLadder((0.5, 0.5), (1.1, 2.0), (3.5, 6.5), (5.0, 8.0))


@pytest.fixture(scope="session")
def example_geom():
    return AnnulusGeometry(2, 1.0, math.e)


@pytest.fixture(scope="session")
def example_sys():
    return NonlinearSystem.builtin_example()


@pytest.fixture(scope="session")
def ladder():
    return LADDER


@pytest.fixture(scope="session")
def example_solutions(example_sys):
    return multi_solve(example_sys, LADDER, SolveOptions())


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion and fail the test on FAIL."""
    def report(number, name, ok, detail=""):
        line = f"criterion {number:>2} {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        request.config.acceptance_lines.append(line)
        print(line)
        assert ok, line
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda x: int(x.split()[1])):
            terminalreporter.write_line(line)
