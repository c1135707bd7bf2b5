import pytest

_KEY = pytest.StashKey[list]()


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run tests marked slow")


def pytest_configure(config):
    config.stash[_KEY] = []


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="slow; use --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the summary prints them in order."""
    log = request.config.stash[_KEY]

    def run(number: int, body) -> None:
        """``body()`` returns (ok, detail); exceptions count as failures."""
        try:
            ok, detail = body()
        except Exception as exc:  # reported, then re-raised by the assert
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        print(line)
        log.append((number, line))
        assert ok, line

    return run


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_KEY, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(log):
        terminalreporter.write_line(line)
