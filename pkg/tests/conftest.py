import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qforge.construct import gallery  # noqa: E402


@lru_cache(maxsize=None)
def _gallery():
    return tuple(gallery())


@pytest.fixture(scope="session")
def gallery_items():
    return _gallery()


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not rep.failed:
        return
    results = item.config.stash.setdefault(_CRITERIA, {})
    results.setdefault(mark.args[0], []).append((item.name, rep.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_CRITERIA, None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        runs = results[n]
        failed = [name for name, ok in runs if not ok]
        status = "FAIL" if failed else "PASS"
        extra = f"  (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:>2}: {status}  [{len(runs)} test(s)]{extra}")
