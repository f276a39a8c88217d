"""Shared fixtures: one engine per session, and the acceptance scoreboard.

The engine memoizes every solved invariant, so expensive degrees are paid
for once no matter how many tests touch them.  Acceptance tests register a
PASS/FAIL verdict per criterion; the scoreboard is printed after the run.
"""

import time

import pytest

from hilb2gw import Engine, invert_counts

_CRITERIA: dict = {}


@pytest.fixture(scope="session")
def engine():
    """Session-wide engine for the two-parameter target."""
    return Engine()


@pytest.fixture(scope="session")
def all_tables(engine):
    """Every (degree, pairs) count table for d <= 7, computed once.

    Returns (tables, seconds_per_degree): tables[(d, l)] is a CountTable.
    """
    tables = {}
    seconds = {}
    for d in range(2, 8):
        t0 = time.perf_counter()
        for l in (0, 1, 2):
            tables[(d, l)] = invert_counts(engine, d, l)
        seconds[d] = time.perf_counter() - t0
    return tables, seconds


def record_criterion(number: int, label: str, passed: bool, note: str = ""):
    """Register an acceptance verdict for the end-of-run scoreboard."""
    _CRITERIA[number] = (label, passed, note)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, passed, note = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"CRITERION {number} [{label}]: {verdict}"
        if note:
            line += f" ({note})"
        terminalreporter.write_line(line)
