import numpy as np
import pytest
from hypothesis import settings


from hankel_ssf.inverse import IntervalSystem
from hankel_ssf.sequences import DiscreteMeasure, from_moment_measure

# fixed example generation so every run sees the same cases
settings.register_profile("repro", derandomize=True, print_blob=True)
settings.load_profile("repro")

# filled by test_acceptance; printed once at the end of the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def geometric():
    """alpha_n = (3/4) 2^-n, the rank-one example."""
    return from_moment_measure(DiscreteMeasure.point(0.5, 0.75), 0)


@pytest.fixture
def two_intervals():
    return IntervalSystem.from_pairs([(0.5, 1.0), (1.5, 2.0)])


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
