import numpy as np
import pytest

from beampredict.scene import default_scene, generate_dataset


@pytest.fixture(scope="session")
def desk_scene():
    return default_scene()


@pytest.fixture(scope="session")
def desk_dataset(desk_scene):
    return generate_dataset(desk_scene, seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
