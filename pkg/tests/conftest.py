"""Replays the acceptance verdict lines after the run.

Output capture swallows prints from passing tests, so the acceptance
tests append their PASS|FAIL lines to the session-scoped verdict log
and the terminal summary writes the full checklist once at the end.
"""

import pytest

_VERDICTS: list = []


@pytest.fixture(scope="session")
def verdict_log():
    return _VERDICTS


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _VERDICTS:
        return
    terminalreporter.write_sep("=", "acceptance checklist")
    for line in sorted(_VERDICTS, key=lambda s: int(s.split(":")[0].split()[1])):
        terminalreporter.write_line(line)
