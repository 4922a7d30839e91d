import pytest


def pytest_configure(config):
    config._acceptance_verdicts = []


@pytest.fixture(scope="session")
def acceptance_verdicts(request):
    """Shared buffer; the terminal summary replays one line per criterion."""
    return request.config._acceptance_verdicts


def pytest_terminal_summary(terminalreporter):
    lines = getattr(terminalreporter.config, "_acceptance_verdicts", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
