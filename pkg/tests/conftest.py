import functools

import pytest

from cspoly.faces import enumerate_edges
from cspoly.polytopes import ClusterSpec, DirectSumSpec, ManyFacesSpec, NeighborlySpec, construct

ACCEPTANCE_LINES: dict[int, str] = {}


@functools.lru_cache(maxsize=None)
def instance(spec):
    return construct(spec)


@functools.lru_cache(maxsize=None)
def edge_report(spec):
    return enumerate_edges(instance(spec))


@pytest.fixture(scope="session")
def p0():
    return instance(NeighborlySpec(0))


@pytest.fixture(scope="session")
def p1():
    return instance(NeighborlySpec(1))


@pytest.fixture(scope="session")
def many_faces():
    return instance(ManyFacesSpec(2, 1, 24))


@pytest.fixture(scope="session")
def sum_of_two():
    return instance(DirectSumSpec(2, 1, 8, 2))


@pytest.fixture(scope="session")
def small_cluster():
    return instance(ClusterSpec(0, 2))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
