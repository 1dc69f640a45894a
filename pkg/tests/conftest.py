import time

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

SUITE_BUDGET_S = 60.0
_RESULTS = pytest.StashKey[list]()
_START = pytest.StashKey[float]()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_sessionstart(session):
    session.config.stash[_START] = time.perf_counter()
    session.config.stash[_RESULTS] = []


@pytest.fixture
def criterion(request, capsys):
    """Record one acceptance line: ``criterion(n, title, passed, detail)``."""

    def record(number, title, passed, detail=""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
        request.config.stash[_RESULTS].append(line)
        with capsys.disabled():
            print("\n" + line)
        return passed

    return record


def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - session.config.stash[_START]
    results = session.config.stash[_RESULTS]
    if not results:
        return
    ok = elapsed <= SUITE_BUDGET_S
    results.append(
        f"[{'PASS' if ok else 'FAIL'}] criterion 8: full test run wall clock {elapsed:.1f} s (budget {SUITE_BUDGET_S:.0f} s)"
    )
    if not ok and session.exitstatus == 0:
        session.exitstatus = 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, [])
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)
