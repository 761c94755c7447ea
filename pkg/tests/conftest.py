import sys

import pytest

from latvoa.fock import LatticeContext
from latvoa.symmetry import named_group
from latvoa.vertex import NamedVectors


@pytest.fixture(scope="session")
def ctx():
    return LatticeContext(2, 20)


@pytest.fixture(scope="session")
def nv(ctx):
    return NamedVectors(ctx)


@pytest.fixture(scope="session")
def k4(ctx):
    return named_group(ctx, "k4")


@pytest.fixture(scope="session")
def a4(ctx):
    return named_group(ctx, "a4")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
