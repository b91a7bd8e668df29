from __future__ import annotations

import pytest

from mdsarray.families import build_c1, build_c2, build_c2prime, build_c3
from mdsarray.msrbase import build_c0, build_yb1, build_yb2


@pytest.fixture(scope="session")
def c1():
    return build_c1(3, 2, 3, 2)


@pytest.fixture(scope="session")
def c2():
    return build_c2(5, 2, 3, 2)


@pytest.fixture(scope="session")
def c2p():
    return build_c2prime(5, 2, 3, 2)


@pytest.fixture(scope="session")
def c2p13():
    return build_c2prime(5, 2, 3, 2, q=13)


@pytest.fixture(scope="session")
def c3():
    return build_c3(5, 2, 3, 2)


@pytest.fixture(scope="session")
def c0():
    return build_c0(3, 2, 3)


@pytest.fixture(scope="session")
def yb1():
    return build_yb1(5, 2, 3)


@pytest.fixture(scope="session")
def yb2():
    return build_yb2(5, 2, 3)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import summary_lines
    except ImportError:
        return
    lines = summary_lines()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
