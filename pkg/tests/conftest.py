import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line PASS/FAIL verdict for an acceptance criterion."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(line)
