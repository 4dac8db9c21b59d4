import numpy as np
import pytest

from lpgnet.graph import generate_bipartite
from lpgnet.nn import TrainConfig
from lpgnet.types import Dataset, Graph, Split


@pytest.fixture
def triangle() -> Graph:
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path4() -> Graph:
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def small_bipartite() -> Dataset:
    return generate_bipartite(n1=60, n2=40, p_edge=0.2, flip1=0.25, flip2=0.625, seed=3)


@pytest.fixture
def fast_config() -> TrainConfig:
    return TrainConfig(lr=0.01, dropout=0.1, hid_s=8, hid_n=1, epochs=15, seed=0)


@pytest.fixture
def toy_dataset(path4) -> Dataset:
    features = np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.0], [0.2, 0.8]])
    return Dataset(graph=path4, features=features, labels=np.array([0, 0, 1, 1]),
                   split=Split([0, 2], [1], [3]), num_classes=2)
