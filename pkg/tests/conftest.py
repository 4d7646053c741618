import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for the acceptance summary."""

    def record(number, title, checks):
        ok = all(passed for _, passed in checks)
        failed = [name for name, passed in checks if not passed]
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}"
        if failed:
            line += " | failing: " + "; ".join(failed)
        _LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
