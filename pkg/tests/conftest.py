import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evtrack.simulation import default_scenario, run_monte_carlo  # noqa: E402
from evtrack.tracker import classifier_c1, classifier_c2  # noqa: E402

MC_SEED = 20070709
MC_RUNS = 1000

_acceptance = []


@pytest.fixture(scope="session")
def scenario():
    return default_scenario()


def _timed_mc(scenario, cm):
    start = time.perf_counter()
    summary = run_monte_carlo(scenario, cm, n_runs=MC_RUNS, master_seed=MC_SEED)
    return summary, time.perf_counter() - start


@pytest.fixture(scope="session")
def mc_c1(scenario):
    """1000-run summary with the good classifier, and its wall time."""
    return _timed_mc(scenario, classifier_c1(scenario.frame))


@pytest.fixture(scope="session")
def mc_c2(scenario):
    return _timed_mc(scenario, classifier_c2(scenario.frame))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        _acceptance.append((number, title, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    grouped = {}
    for number, title, outcome in _acceptance:
        grouped.setdefault((number, title), []).append(outcome)
    terminalreporter.section("acceptance criteria")
    for (number, title), outcomes in sorted(grouped.items()):
        verdict = "PASS" if all(o == "passed" for o in outcomes) else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {number}. {title} ({len(outcomes)} checks)")
