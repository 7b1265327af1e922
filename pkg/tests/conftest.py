from __future__ import annotations

import pytest

from hexforge.geometry import Hexagon
from hexforge.groupaction import GroupAction
from hexforge.hexsystem import make_system

_SYSTEMS = {
    "H1/2": ("OneF", 2, 1),
    "H1/4": ("OneF", 2, 2),
    "H1/5": ("OneF", 5, 1),
    "H4/3": ("OneF", 3, 1),
    "H2/2": ("ThreeF", 2, 1),
}
_hex_cache: dict[str, Hexagon] = {}
_ga_cache: dict[str, GroupAction] = {}

ACCEPTANCE_LINES: list[str] = []


def hexagon(name: str) -> Hexagon:
    if name not in _hex_cache:
        kind, p, k = _SYSTEMS[name]
        _hex_cache[name] = Hexagon(make_system(kind, p, k))
    return _hex_cache[name]


def action(name: str) -> GroupAction:
    if name not in _ga_cache:
        _ga_cache[name] = GroupAction(hexagon(name))
    return _ga_cache[name]


@pytest.fixture(scope="session")
def h12():
    return hexagon("H1/2")


@pytest.fixture(scope="session")
def ga12():
    return action("H1/2")


@pytest.fixture(scope="session")
def h43():
    return hexagon("H4/3")


@pytest.fixture(scope="session")
def ga43():
    return action("H4/3")


@pytest.fixture(scope="session")
def h22():
    return hexagon("H2/2")


@pytest.fixture(scope="session")
def ga22():
    return action("H2/2")


@pytest.fixture(scope="session")
def ga14():
    return action("H1/4")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long exhaustive runs (deselect with -m 'not slow')")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
