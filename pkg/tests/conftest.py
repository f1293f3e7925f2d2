from __future__ import annotations

import contextlib

import pytest

from sqbias import rademacher
from sqbias.extremal import TwoPointFamily

_LINES: list[tuple[int, str]] = []


@pytest.fixture
def two_point():
    """The p = 0.1 member: atoms -1/3 and 3."""
    return TwoPointFamily(0.1).dist()


@pytest.fixture
def rad():
    return rademacher(1.0)


@pytest.fixture
def acceptance():
    """Context manager recording one PASS/FAIL line per criterion."""

    @contextlib.contextmanager
    def record(number: int, title: str):
        info: dict = {}
        try:
            yield info
        except BaseException:
            line = f"[FAIL] criterion {number:2d}: {title} {info.get('detail', '')}".rstrip()
            _LINES.append((number, line))
            print(line)
            raise
        line = f"[PASS] criterion {number:2d}: {title} {info.get('detail', '')}".rstrip()
        _LINES.append((number, line))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_LINES):
        terminalreporter.write_line(line)

