"""Shared pytest plumbing: the acceptance-criteria report.

Acceptance tests record one line per criterion through the
``acceptance_record`` fixture; the collected lines are replayed in a
dedicated section of the terminal summary so every run ends with a
compact pass/fail scoreboard regardless of output capture.
"""

import pytest

_acceptance_lines = []


@pytest.fixture
def acceptance_record():
    def _record(num, ok, detail, skip=False):
        status = "SKIP" if skip else ("PASS" if ok else "FAIL")
        line = f"criterion {num:2d}: {status} - {detail}"
        _acceptance_lines.append((num, line))
        print(line, flush=True)
        if skip:
            pytest.skip(detail)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_acceptance_lines):
            terminalreporter.write_line(line)
