import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from ricciscope.core import HomSpaceSpec
from ricciscope.spaces import ledger_obata as lo
from ricciscope.spaces import stiefel


@st.composite
def specs(draw, max_r=4):
    r = draw(st.integers(1, max_r))
    dims = draw(st.lists(st.integers(1, 6), min_size=r, max_size=r))
    killing = draw(st.lists(st.floats(0.1, 10.0), min_size=r, max_size=r))
    triples = {}
    for key in itertools.combinations_with_replacement(range(r), 3):
        if draw(st.booleans()):
            triples[key] = draw(st.floats(0.05, 5.0))
    tensor = draw(st.lists(st.floats(0.1, 5.0), min_size=r, max_size=r))
    return HomSpaceSpec(dims, killing, triples, tensor)


@st.composite
def positive_vectors(draw, n, lo_=0.05, hi=20.0):
    return np.array(draw(st.lists(st.floats(lo_, hi), min_size=n, max_size=n)))


def random_stiefel_metric(rng):
    while True:
        x = np.array([*rng.uniform(0.2, 5.0, 3), *rng.uniform(-2.0, 2.0, 2)])
        if x[1] * x[2] - x[3] ** 2 - x[4] ** 2 > 0.05:
            return x


def random_lo_metric(rng):
    while True:
        x = np.array([*rng.uniform(0.2, 5.0, 2), rng.uniform(-2.0, 2.0)])
        if x[0] * x[1] - x[2] ** 2 > 0.05:
            return x


@pytest.fixture(scope="session")
def stiefel_fam():
    return stiefel.stiefel_family()


@pytest.fixture(scope="session")
def lo_fam():
    return lo.lo_family()


# -- acceptance criteria report ------------------------------------------------

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """record(n, title, ok, detail): print one PASS/FAIL line and assert."""

    def record(n, title, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} criterion {n} ({title}): {detail}"
        print(line)
        ACCEPTANCE_LINES.append((n, line))
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES, key=lambda x: x[0]):
            terminalreporter.write_line(line)
