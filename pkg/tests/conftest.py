import pytest

_LINES = []


class CriterionReport:
    def __init__(self, number: int, title: str):
        self.number, self.title = number, title

    def check(self, passed: bool, detail: str) -> None:
        _LINES.append(f"criterion {self.number:>2} [{'PASS' if passed else 'FAIL'}] {self.title}: {detail}")
        assert passed, detail


@pytest.fixture
def criterion():
    return CriterionReport


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES, key=lambda l: int(l.split()[1])):
            terminalreporter.write_line(line)
