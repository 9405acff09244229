import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=30, deadline=None)
settings.load_profile("ci")


def random_adjacency(rng, n, q=None):
    q = rng.uniform(0.1, 0.9) if q is None else q
    a = np.triu(rng.random((n, n)) < q, 1).astype(np.int8)
    return a + a.T


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
