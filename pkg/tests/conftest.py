import numpy as np
import pytest

import stapvcf as sv

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def table1_dataset():
    """One clean full-scale dataset shared across the slower tests."""
    return sv.simulate_dataset(sv.table1_scenario(seed=0))


@pytest.fixture(scope="session")
def small_scenario():
    """A reduced scenario for fast pipeline/CLI round trips (16-dim snapshots)."""
    return sv.table1_scenario(seed=3, num_elements=4, num_pulses=4,
                              num_clutter_patches=33, num_range_cells=40,
                              texture_sigma_db=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
