import math

import numpy as np
import pytest

from decdirac.dual import build_dual, hodge_stars
from decdirac.mesh import build_complex, load_fixture, perturb_interior

SQRT3 = math.sqrt(3.0)

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    def record(name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def equilateral(side=1.0):
    return build_complex([[0, 0], [side, 0], [side / 2, side * SQRT3 / 2]], [[0, 1, 2]])


def with_stars(c):
    d = build_dual(c)
    return c, d, hodge_stars(c, d)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def square():
    return load_fixture("square")


@pytest.fixture(scope="session")
def tri():
    return load_fixture("triangle")


@pytest.fixture(scope="session")
def perturbed(tri):
    return perturb_interior(tri, 0.05, 1)


@pytest.fixture(scope="session", params=["square", "triangle", "perturbed"])
def any_fixture(request, square, tri, perturbed):
    return {"square": square, "triangle": tri, "perturbed": perturbed}[request.param]
