import warnings

import numpy as np
import pytest
from hypothesis import settings

from privcons.graph import paper_topology, random_weight_schedule
from privcons.scenario import EpsilonBoundWarning

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(autouse=True)
def _quiet_paper_epsilon():
    # the benchmark presets knowingly exceed the decomposed step bound
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EpsilonBoundWarning)
        yield


@pytest.fixture
def paper():
    return paper_topology()


@pytest.fixture
def paper_x0():
    return np.array([1.0, 2.0, 3.0, 4.0, 5.0])


@pytest.fixture
def const_weights(paper):
    def make(horizon, value=0.75):
        return random_weight_schedule(paper, horizon, np.random.default_rng(0), steady=value, round0=value)
    return make


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report_criterion():
    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
