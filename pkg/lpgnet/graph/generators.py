import math

import numpy as np

from lpgnet.types import Dataset, Graph, GraphError, Split, decode_triangle_slots
from lpgnet.utils.logger_config import make_logger

__all__ = ["generate_bipartite", "generate_erdos_renyi", "random_split", "BIPARTITE_DEFAULTS"]

logger = make_logger("graph.generators")

BIPARTITE_DEFAULTS = {"n1": 500, "n2": 400, "p_edge": 0.05, "flip1": 0.25, "flip2": 0.625}


def _check_probability(name: str, value: float):
    if not 0.0 <= value <= 1.0:
        raise GraphError(f"{name} must lie in [0, 1], got {value}")


def random_split(num_nodes: int, rng: np.random.Generator, test_fraction=0.5, val_fraction=0.3) -> Split:
    """
    Seeded split: `test_fraction` of the nodes for testing, and `val_fraction`
    of the remaining training nodes held out for validation.
    """
    perm = rng.permutation(num_nodes)
    num_test = int(math.floor(num_nodes * test_fraction))
    train_pool, test = perm[num_test:], perm[:num_test]
    num_val = int(math.floor(train_pool.shape[0] * val_fraction))
    val, train = train_pool[:num_val], train_pool[num_val:]
    return Split(np.sort(train), np.sort(val), np.sort(test))


def generate_bipartite(n1: int, n2: int, p_edge: float, flip1: float, flip2: float, seed: int) -> Dataset:
    """
    Two-cluster bipartite dataset whose features do not follow the structure.

    Every cluster-1/cluster-2 pair becomes an edge with probability `p_edge`;
    no intra-cluster edge exists. Features start at [1, -1] (cluster 1) and
    [-1, 1] (cluster 2); exactly floor(flip1·n1) and floor(flip2·n2) nodes,
    picked by the seeded RNG, get the other cluster's feature.
    """
    if n1 <= 0 or n2 <= 0:
        raise GraphError(f"cluster sizes must be positive, got {n1}, {n2}")
    for name, value in (("p_edge", p_edge), ("flip1", flip1), ("flip2", flip2)):
        _check_probability(name, value)
    rng = np.random.default_rng(seed)

    mask = rng.random((n1, n2)) < p_edge
    left, right = np.nonzero(mask)
    edges = np.stack([left, right + n1], axis=1)
    graph = Graph.from_edges(n1 + n2, edges)

    labels = np.concatenate([np.zeros(n1, dtype=np.int64), np.ones(n2, dtype=np.int64)])
    features = np.empty((n1 + n2, 2), dtype=np.float64)
    features[:n1] = (1.0, -1.0)
    features[n1:] = (-1.0, 1.0)
    flipped1 = rng.choice(n1, size=int(math.floor(flip1 * n1)), replace=False)
    flipped2 = n1 + rng.choice(n2, size=int(math.floor(flip2 * n2)), replace=False)
    features[flipped1] = (-1.0, 1.0)
    features[flipped2] = (1.0, -1.0)

    split = random_split(n1 + n2, rng)
    dataset = Dataset(graph=graph, features=features, labels=labels, split=split, num_classes=2)
    logger.info(f"generated bipartite {dataset!r}")
    return dataset


def generate_erdos_renyi(num_nodes: int, num_edges: int, seed: int, num_classes: int = 2,
                         num_features: int = 8) -> Dataset:
    """
    Uniform G(n, m) graph with exactly `num_edges` distinct edges.

    Labels are uniform in [0, num_classes) and features are standard normal;
    neither carries structure, so the dataset serves graph-level experiments
    (noisy-edge profiles, density checks).
    """
    max_edges = num_nodes * (num_nodes - 1) // 2
    if num_nodes < 2:
        raise GraphError(f"need at least two nodes, got {num_nodes}")
    if not 0 <= num_edges <= max_edges:
        raise GraphError(f"num_edges must lie in [0, {max_edges}], got {num_edges}")
    rng = np.random.default_rng(seed)

    slots = np.sort(rng.choice(max_edges, size=num_edges, replace=False))
    graph = Graph.from_edges(num_nodes, decode_triangle_slots(num_nodes, slots))

    labels = rng.integers(0, num_classes, size=num_nodes)
    features = rng.standard_normal((num_nodes, num_features))
    split = random_split(num_nodes, rng)
    dataset = Dataset(graph=graph, features=features, labels=labels, split=split, num_classes=num_classes)
    logger.info(f"generated erdos-renyi {dataset!r}")
    return dataset
