import os
import sys

import pytest

HERE = os.path.dirname(__file__)
CORPUS = os.path.join(HERE, "corpus")

CRITERIA = {
    1: "oracle agrees with case analysis on all tiny {-1,0,1} matrices",
    2: "greedy never certifies a non-herdable instance",
    3: "follower reduction preserves the verdict and the image",
    4: "star test matches the oracle exhaustively",
    5: "depth-2 tree test matches the oracle",
    6: "diagonal pair test matches the oracle exhaustively",
    7: "sufficient checks never contradict the oracle",
    8: "herding plans reach the threshold",
    9: "9-node depth-3 layered tree and its sign-flipped variant",
    10: "batch reports are byte-identical across runs",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when not in ("setup", "call"):
        return
    n = mark.args[0]
    ok = not rep.failed and not (rep.when == "setup" and rep.skipped)
    results = item.config._criteria
    results[n] = results.get(n, True) and ok


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config._criteria
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        verdict = "PASS" if results[n] else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  {CRITERIA.get(n, '')}")


@pytest.fixture
def corpus_dir():
    return CORPUS


@pytest.fixture
def herdkit_cmd():
    return [sys.executable, "-m", "herdkit"]
