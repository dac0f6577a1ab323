import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_REPORTS = {}


@pytest.fixture(scope="session")
def scenario_report():
    """``run_scenario`` with a per-session cache, so batches shared by several tests run once."""
    from sstdecomp.evaluate import run_scenario

    def get(name, reps, seed0=0):
        key = (name, reps, seed0)
        if key not in _REPORTS:
            _REPORTS[key] = run_scenario(name, reps, seed0)
        return _REPORTS[key]

    return get


_CRITERIA = {}


@pytest.fixture(scope="session")
def criterion():
    """Record one pass/fail line per acceptance criterion; printed here and in the terminal summary."""

    def record(key, passed, detail):
        prev = _CRITERIA.get(key)
        if prev is not None:  # a criterion checked by several tests fails if any part fails
            passed, detail = prev[0] and passed, f"{prev[1]}; {detail}"
        _CRITERIA[key] = (passed, detail)
        print(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {detail}")
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        passed, detail = _CRITERIA[key]
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {key}: {detail}")
