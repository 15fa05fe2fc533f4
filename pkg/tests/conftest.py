import pytest

from psi_lab.basis import IndexWindow
from psi_lab.bells import make_meyer, make_shannon

# acceptance lines, printed once at the end of the session
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def shannon():
    return make_shannon()


@pytest.fixture(scope="session")
def meyer():
    return make_meyer()


@pytest.fixture
def small_window():
    return IndexWindow(-2, 2, 8)
