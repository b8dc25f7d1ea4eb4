import numpy as np
import pytest

from convexsandwich.bodies import VPolytope


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def hexagon():
    return VPolytope([[1, 0], [-1, 0], [0, 1], [0, -1], [1, -1], [-1, 1]])


@pytest.fixture
def skew_triangle():
    return VPolytope([[-1, -1], [1, 0], [0, 1]])


def random_polytope(rng, d, n=None, symmetric=False):
    n = n or 2 * d + 3
    V = rng.standard_normal((n, d))
    if symmetric:
        return VPolytope(np.vstack([V, -V]))
    return VPolytope(V - V.mean(axis=0))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
