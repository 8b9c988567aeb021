"""Shared test plumbing.

The acceptance tests record one PASS/FAIL line per criterion; the lines are
replayed in a terminal section after the run so the outcome is readable
without digging through the pytest report.
"""

from __future__ import annotations

import pytest

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Recorder callable for acceptance criterion result lines."""
    return _ACCEPTANCE_LINES.append


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
