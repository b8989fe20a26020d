import contextlib
import time

import pytest

_RESULTS = {}


class Criterion:
    def __init__(self, number, title):
        self.number, self.title = number, title
        self.details = []
        self.passed = False

    def note(self, text):
        self.details.append(text)


@pytest.fixture
def criterion():
    """Record one acceptance criterion; it counts as passed only if the body finishes."""

    @contextlib.contextmanager
    def open_criterion(number, title, max_seconds=None):
        c = Criterion(number, title)
        _RESULTS[number] = c
        start = time.perf_counter()
        yield c
        elapsed = time.perf_counter() - start
        c.note(f"{elapsed:.2f}s")
        if max_seconds is not None:
            assert elapsed < max_seconds, f"criterion {number} took {elapsed:.2f}s (limit {max_seconds}s)"
        c.passed = True

    return open_criterion


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        c = _RESULTS[n]
        status = "PASS" if c.passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {n:2d}. {c.title} ({'; '.join(c.details)})")
