import pytest

from concat import Machine
from concat.values import render

_RESULTS: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def base():
    """One stdlib-loaded machine; tests fork it instead of reloading the library."""
    return Machine(out=lambda s: None)


@pytest.fixture
def machine(base):
    return base.fork()


def run(m: Machine, program: str, stack=()) -> list[str]:
    """Run ``program`` on a fork of ``m`` and return the rendered stack, bottom first."""
    f = m.fork()
    f.stack = list(stack)
    f.run(program)
    return [render(v) for v in f.stack]


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n, title = marker.args
    if report.when == "call" or report.failed:
        status = "PASS" if report.passed else "FAIL"
        if _RESULTS.get(n, ("PASS",))[0] == "PASS":
            _RESULTS[n] = (status, title)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        status, title = _RESULTS[n]
        terminalreporter.write_line(f"{status}  {n:>2}. {title}")
