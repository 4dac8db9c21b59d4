from dataclasses import dataclass
import math

import numpy as np

from lpgnet.dp import DEGREE_VECTOR_SENSITIVITY, BudgetLedger, MechanismError, laplace_noise, laplace_scale
from lpgnet.types import Graph, GraphError, Phase
from lpgnet.utils.logger_config import make_logger

__all__ = ["DegreeVectorMatrix", "cluster_degree_counts", "find_degree_vec", "hard_labels"]

logger = make_logger("models.degree_vectors")


@dataclass(frozen=True, eq=False)
class DegreeVectorMatrix:
    """values[v, c]: number of v's neighbors predicted in cluster c (noised when epsilon is finite)."""

    values: np.ndarray
    epsilon: float
    layer: int

    @property
    def num_classes(self) -> int:
        return int(self.values.shape[1])


def hard_labels(logits: np.ndarray) -> np.ndarray:
    """argmax over classes; ties go to the lowest class index."""
    return np.argmax(logits, axis=1).astype(np.int64)


def cluster_degree_counts(graph: Graph, labels, num_classes: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (graph.num_nodes,):
        raise GraphError(f"expected {graph.num_nodes} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise GraphError(f"labels must lie in [0, {num_classes})")
    onehot = np.zeros((graph.num_nodes, num_classes), dtype=np.float64)
    onehot[np.arange(graph.num_nodes), labels] = 1.0
    return np.asarray(graph.to_sparse() @ onehot)


def find_degree_vec(graph: Graph, labels, eps: float, rng: np.random.Generator, *, num_classes: int | None = None,
                    ledger: BudgetLedger | None = None, phase: Phase = Phase.Train,
                    layer: int = 0) -> DegreeVectorMatrix:
    """
    Noisy cluster degree vectors.

    Exact per-cluster neighbor counts plus independent Laplace(2/eps) noise on
    every entry; eps = inf returns the exact counts. The (phase, layer) query
    is charged to `ledger` before any noise is drawn.
    """
    if math.isnan(eps) or eps <= 0:
        raise MechanismError(f"epsilon must be positive or inf, got {eps}")
    labels = np.asarray(labels, dtype=np.int64)
    if num_classes is None:
        num_classes = int(labels.max()) + 1 if labels.size else 1
    counts = cluster_degree_counts(graph, labels, num_classes)
    if ledger is not None:
        ledger.charge(phase, layer, eps)
    if math.isinf(eps):
        return DegreeVectorMatrix(values=counts, epsilon=eps, layer=layer)
    noise = laplace_noise(laplace_scale(DEGREE_VECTOR_SENSITIVITY, eps), counts.shape, rng)
    logger.info(f"degree vectors for {phase.value} layer {layer}: {graph.num_nodes}x{num_classes}, eps={eps:.6g}")
    return DegreeVectorMatrix(values=counts + noise, epsilon=eps, layer=layer)
