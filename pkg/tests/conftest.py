import pytest

from mwfasrank._backend import BACKENDS

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
