from __future__ import annotations

import contextlib
import os
import random

import pytest

_LINES: dict[int, str] = {}


class _Criterion:
    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.detail = ""


@pytest.fixture
def criterion():
    """Context manager recording a PASS/FAIL line for an acceptance criterion."""

    @contextlib.contextmanager
    def run(number: int, title: str):
        c = _Criterion(number, title)
        try:
            yield c
        except BaseException as exc:
            msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
            _LINES[number] = f"criterion {number:2d} FAIL  {title}: {msg[:160]}"
            print(_LINES[number])
            raise
        _LINES[number] = f"criterion {number:2d} PASS  {title}: {c.detail}"
        print(_LINES[number])

    return run


@pytest.fixture
def rng() -> random.Random:
    return random.Random(int(os.environ.get("KGRAPH_LAB_SEED", "20260"), 10))


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_LINES):
        terminalreporter.write_line(_LINES[n])
