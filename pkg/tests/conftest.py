from __future__ import annotations

import time

import pytest

_LINES: list[str] = []


class Criterion:
    """Records one acceptance criterion and prints its pass/fail line."""

    def __init__(self, number: str, title: str, limit: float | None = None):
        self.number = number
        self.title = title
        self.limit = limit
        self.start = time.perf_counter()

    def finish(self, ok: bool, detail: str = "") -> None:
        elapsed = time.perf_counter() - self.start
        in_time = self.limit is None or elapsed < self.limit
        ok = ok and in_time
        budget = f" (limit {self.limit:g}s)" if self.limit is not None else ""
        line = f"{'PASS' if ok else 'FAIL'} criterion {self.number}: {self.title} [{elapsed:.2f}s{budget}]"
        if detail:
            line += f" {detail}"
        print(line)
        _LINES.append(line)
        assert in_time, f"criterion {self.number} took {elapsed:.2f}s, limit {self.limit}s"
        assert ok, line


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: [int(t) if t.isdigit() else t for t in s.split()[2].rstrip(":").split(".")]):
            terminalreporter.write_line(line)
