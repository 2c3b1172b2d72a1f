import pytest

# Lines recorded by the acceptance tests, echoed in the terminal summary so
# they are visible without ``-s``.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_line():
    def _add(line: str) -> None:
        print(line)
        ACCEPTANCE_LINES.append(line)

    return _add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
