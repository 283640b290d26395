"""Shared pytest wiring.

test_acceptance.py records one line per acceptance criterion through
record_acceptance; the hook below prints the block after the test summary
so every run ends with an explicit pass/FAIL line per criterion.
"""

from __future__ import annotations

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, passed: bool) -> None:
    ACCEPTANCE_LINES.append(f"acceptance: {name}: {'pass' if passed else 'FAIL'}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
