import pytest

ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def record():
    """Store a one-line verdict for an acceptance criterion."""

    def _record(number: int, passed: bool, detail: str) -> None:
        ACCEPTANCE[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
