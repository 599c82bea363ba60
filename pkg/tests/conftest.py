import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from schedsim import TaskSpec, Workload  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def make_workload(*rows, name="w"):
    """Workload from ``(arrival, burst, deadline[, value])`` rows; ids by position."""
    rows = sorted(enumerate(rows), key=lambda r: (r[1][0], r[0]))
    tasks = []
    for new_id, (_, row) in enumerate(rows):
        tasks.append(TaskSpec(new_id, *row))
    return Workload(tuple(tasks), name=name)


_criteria = []


@pytest.fixture
def criterion(request):
    """Record a named acceptance criterion's outcome for the end-of-run report."""
    def record(label, ok, detail=""):
        _criteria.append((label, bool(ok), detail))
        assert ok, f"{label}: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _criteria:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}  {detail}")
