"""Shared test plumbing: the acceptance gate's summary printer.

Acceptance tests register one line per criterion; the terminal summary
section reprints them after the run so the verdicts are visible without -s.
"""

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
