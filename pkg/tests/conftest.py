import numpy as np
import pytest

from isoprincipal import problem, ratfun


def crandn(rng, *shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_ratfun(m, n, seed, variant="PZ"):
    p = problem.random_problem(m, n, seed)
    return ratfun.build(p.t, (p.F, p.G), variant)


@pytest.fixture
def scalar_pz():
    # R(z) = (z - 1)/z: pole at 0, zero at 1
    return ratfun.build([0.0, 1.0], ([[1.0]], [[1.0]]), "PZ")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
