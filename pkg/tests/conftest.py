import pytest

_LINES = pytest.StashKey[list]()


def pytest_addoption(parser):
    parser.addoption(
        "--sachs-csv",
        default=None,
        help="flow-cytometry CSV (one column per protein) for the graph benchmark",
    )


def pytest_configure(config):
    config.stash[_LINES] = []


@pytest.fixture
def sachs_csv(request):
    return request.config.getoption("--sachs-csv")


@pytest.fixture
def criterion(request):
    """Record one acceptance line; shown in the terminal summary."""
    lines = request.config.stash[_LINES]

    def record(num, ok, detail):
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        lines.append(f"criterion {num:>4}: {status}  {detail}")
        print(lines[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash[_LINES]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
