import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from spine.bigraph import BipartiteGraph

settings.register_profile(
    "suite",
    max_examples=1000,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def table1_graph() -> BipartiteGraph:
    """First member of the 3x3 ensemble with margins [1,1,2] x [1,1,2]."""
    return BipartiteGraph([[1, 0, 0], [0, 0, 1], [0, 1, 1]])


@pytest.fixture(scope="session")
def table1_marginals() -> np.ndarray:
    return np.array([[0.2, 0.2, 0.6], [0.2, 0.2, 0.6], [0.6, 0.6, 0.8]])


@pytest.fixture(scope="session")
def table1_bicm() -> np.ndarray:
    return np.array(
        [[0.216, 0.216, 0.568], [0.216, 0.216, 0.568], [0.568, 0.568, 0.863]]
    )


def random_graph(rng: np.random.Generator, max_m: int = 8, max_n: int = 8) -> BipartiteGraph:
    m = int(rng.integers(1, max_m + 1))
    n = int(rng.integers(1, max_n + 1))
    cells = (rng.random((m, n)) < rng.uniform(0.1, 0.9)).astype(np.uint8)
    return BipartiteGraph(cells)
