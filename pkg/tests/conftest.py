import pytest

ACCEPTANCE_LINES: list = []


@pytest.fixture
def verdict():
    """Record one acceptance line, then assert it."""

    def record(n, ok, detail=""):
        ACCEPTANCE_LINES.append(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, f"criterion {n}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
