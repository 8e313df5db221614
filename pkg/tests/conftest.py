import numpy as np
import pytest

from tsnn import dataio

ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def small_ds():
    features = np.array([[2.0, 10.0], [4.0, 10.0], [6.0, 10.0], [3.0, 10.0]])
    return dataio.FlowDataset(features, np.array([0, 1, 0, 1]), ("a", "b"))


@pytest.fixture(scope="session")
def synthetic_600():
    return dataio.generate_synthetic(dataio.SyntheticSpec(600, 10, (0, 3), 5.0, 0.8, 7))
