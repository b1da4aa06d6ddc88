import dataclasses

import pytest

from levitrap.pipeline import evaluate
from levitrap.scenario import FeedbackPlan, fixture


@pytest.fixture(scope="session")
def baseline():
    return fixture("baseline_70nm")


@pytest.fixture(scope="session")
def large():
    return fixture("large_180nm")


@pytest.fixture(scope="session")
def baseline_result(baseline):
    return evaluate(baseline)


@pytest.fixture(scope="session")
def large_result(large):
    return evaluate(large)


@pytest.fixture(scope="session")
def hybrid_result(baseline):
    plan = FeedbackPlan("hybrid", coulomb_axis=3, critical_fraction=0.1, optimum_fraction=1.0)
    return evaluate(baseline.replace(feedback=plan))


@pytest.fixture(scope="session")
def pinned_baseline(baseline):
    gas = dataclasses.replace(baseline.gas, ambient_pressure=None, damping_over_critical=10.0)
    return baseline.replace(gas=gas)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, verdict_line

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(verdict_line(n, *RESULTS[n]))
