from __future__ import annotations

from pathlib import Path

import pytest

from branchbpa.core import parse_system
from branchbpa.counter import gen_counter

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


@pytest.fixture(scope="session")
def corpus() -> Path:
    return CORPUS


@pytest.fixture
def counter2():
    # fresh per test so memo tables never leak between tests
    return gen_counter(2)


@pytest.fixture
def counter3():
    return gen_counter(3)


def system(text: str):
    return parse_system(text.strip() + "\n")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
