import pytest


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    """Shared table cache so expensive two-center tables are built once per run."""
    return tmp_path_factory.mktemp("tables")


@pytest.fixture(autouse=True)
def _isolated_cache(monkeypatch, tmp_path):
    # never touch the user's cache from tests
    monkeypatch.setenv("PLANARBOND_CACHE", str(tmp_path / "env-cache"))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
