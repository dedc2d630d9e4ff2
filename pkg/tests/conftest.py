import numpy as np
import pytest

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.failed):
        mark = next((m for m in report.user_properties if m[0] == "criterion"), None)
        if mark:
            _criteria[mark[1]] = report.outcome


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            item.user_properties.append(("criterion", m.args))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (num, title), outcome in sorted(_criteria.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {num:>2}. {title}")
