import numpy as np
import pytest

from pasbounds.channel import Dmc, factor

ACCEPTANCE_LINES = []


def random_dmc(rng, nx, ny):
    return Dmc(tuple(range(nx)), tuple(range(ny)), rng.dirichlet(np.ones(ny), size=nx))


def random_factored(rng, na, ns, ny):
    return factor(random_dmc(rng, na * ns, ny), range(na), range(ns))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
