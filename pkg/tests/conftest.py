import numpy as np
import pytest

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    passed = call.excinfo is None
    detail = "" if passed else str(call.excinfo.value).splitlines()[0][:160]
    prev = _criteria.get(number)
    if prev is not None:
        passed = passed and prev[1]
        detail = prev[2] or detail
    _criteria[number] = (title, passed, detail, call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, passed, detail, secs = _criteria[number]
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {title}  ({secs:.2f} s)"
        if detail:
            line += f"  -- {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
