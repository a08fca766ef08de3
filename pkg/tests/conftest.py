import time

import numpy as np
import pytest

from grsse.codes import LinearCode, golay_code
from grsse.gf import ParityCheckMatrix

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item.user_properties.append(("elapsed", time.perf_counter() - start))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        elapsed = dict(item.user_properties).get("elapsed", 0.0)
        _ACCEPTANCE[number] = (title, report.outcome, elapsed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, outcome, elapsed = _ACCEPTANCE[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}  ({elapsed:.2f} s)")


@pytest.fixture(scope="session")
def golay():
    return golay_code()


def six_three_code() -> LinearCode:
    """[6,3,3] code with generator [I | P], each message bit extended by the parity of the other two."""
    P = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
    H = np.concatenate([P.T, np.eye(3, dtype=int)], axis=1)
    return LinearCode("six-three", ParityCheckMatrix.from_array(H, 2))


@pytest.fixture
def six_three():
    return six_three_code()
