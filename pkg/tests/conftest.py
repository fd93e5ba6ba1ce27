import pytest

ACCEPTANCE_LINES: dict = {}


@pytest.fixture
def report():
    """Record one summary line per acceptance criterion: report(n, passed, detail)."""
    def _record(n, passed, detail=""):
        line = f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES[n] = line
        print(line)
        return passed
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
