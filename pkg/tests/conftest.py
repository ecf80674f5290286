import pytest

from helpers import build_lang46_repo


@pytest.fixture(scope="session")
def lang46(tmp_path_factory):
    return build_lang46_repo(tmp_path_factory.mktemp("lang46") / "repo")


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
