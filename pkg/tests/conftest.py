import contextlib
import os
import sys
import time

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_RESULTS = {}


@pytest.fixture
def criterion():
    """``with criterion(n, limit):`` times a block and records PASS/FAIL for the summary."""

    @contextlib.contextmanager
    def run(n, limit, label=""):
        start = time.perf_counter()
        status = "FAIL"
        try:
            yield
            elapsed = time.perf_counter() - start
            status = "PASS" if elapsed < limit else "FAIL (time)"
        finally:
            elapsed = time.perf_counter() - start
            _RESULTS[n] = f"criterion {n}: {status:<11} {elapsed:7.2f} s / {limit} s  {label}"
            print(_RESULTS[n])
        assert elapsed < limit, f"criterion {n} took {elapsed:.1f} s, limit {limit} s"

    return run


def pytest_terminal_summary(terminalreporter):
    if _RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_RESULTS):
            terminalreporter.write_line(_RESULTS[n])
