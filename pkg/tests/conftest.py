import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        number, title = m.args
        prev = _ACCEPTANCE.get(number, (title, "PASS"))[1]
        _ACCEPTANCE[number] = (title, "PASS" if rep.passed and prev == "PASS" else "FAIL")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE, key=int):
        title, status = _ACCEPTANCE[number]
        terminalreporter.write_line(f"[{status}] AC{number}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
