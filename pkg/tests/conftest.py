import pytest

from covertower.tower import build_tower

_ACCEPTANCE = []


@pytest.fixture(scope="session")
def tower():
    return build_tower(6)


@pytest.fixture(scope="session")
def deep_tower():
    return build_tower(10)


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE):
        terminalreporter.write_line(line)
