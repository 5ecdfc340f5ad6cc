import numpy as np
import pytest

from routepe.core import Instance, Variant

ACCEPTANCE_LINES: list[str] = []


def make_cvrp(coords, demands=None, capacity=100, name="t"):
    coords = np.asarray(coords, dtype=float)
    if demands is None:
        demands = [0] + [1] * (len(coords) - 1)
    return Instance(Variant.CVRP, coords, demands=demands, capacity=capacity, name=name)


@pytest.fixture
def square():
    """Depot at the origin and three customers on the unit square's corners."""
    return make_cvrp([[0, 0], [1, 0], [1, 1], [0, 1]])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
