from dataclasses import dataclass
import math

import numpy as np
import scipy.sparse as sp

from lpgnet.dp import (ADJACENCY_SENSITIVITY, EDGE_COUNT_SENSITIVITY, MechanismError, laplace_noise, laplace_sample,
                       laplace_scale)
from lpgnet.types import Graph, decode_triangle_slots, encode_triangle_slots
from lpgnet.utils.config import format_epsilon
from lpgnet.utils.logger_config import make_logger

__all__ = ["PerturbedAdjacency", "dpgcn_perturb", "upper_triangle_array", "DEFAULT_EPS_R"]

logger = make_logger("models.dpgcn")

DEFAULT_EPS_R = 0.01
# triangle slots noised per pass
_CHUNK_SLOTS = 1 << 20


@dataclass(frozen=True, eq=False)
class PerturbedAdjacency:
    graph: Graph
    num_selected: int
    noisy_fraction: float
    epsilon: float
    eps_r: float

    @property
    def matrix(self) -> sp.csr_matrix:
        return self.graph.to_sparse()

    def to_record(self) -> dict:
        return {"num_nodes": self.graph.num_nodes, "num_selected": self.num_selected,
                "noisy_fraction": self.noisy_fraction, "epsilon": format_epsilon(self.epsilon), "eps_r": self.eps_r}


def upper_triangle_array(graph: Graph) -> np.ndarray:
    """0/1 strict upper triangle of A in row-major slot order."""
    n = graph.num_nodes
    values = np.zeros(n * (n - 1) // 2, dtype=np.float64)
    values[encode_triangle_slots(n, graph.edge_array())] = 1.0
    return values


def _top_slots(values: np.ndarray, slots: np.ndarray, k: int):
    # descending value, ascending slot on ties
    order = np.lexsort((slots, -values))[:k]
    return values[order], slots[order]


def dpgcn_perturb(graph: Graph, eps: float, eps_r: float = DEFAULT_EPS_R, rng: np.random.Generator | None = None,
                  *, count_rng: np.random.Generator | None = None) -> PerturbedAdjacency:
    """
    Releases a noisy adjacency with about |E| edges.

    Ẽ = floor(|E| + Lap(1/eps_r)), clamped to [0, N(N-1)/2]; every strict
    upper-triangle entry of A gets Lap(1/(eps - eps_r)) and the Ẽ largest
    noisy entries become the released edges. The edge-count draw uses
    `count_rng` (a child of `rng` when omitted). eps = inf returns the graph
    unchanged.
    """
    if math.isinf(eps):
        return PerturbedAdjacency(graph, graph.num_edges, 0.0, eps, eps_r)
    if not (eps_r > 0 and eps > eps_r):
        raise MechanismError(f"need 0 < eps_r < eps, got eps={eps}, eps_r={eps_r}")
    if rng is None:
        raise MechanismError("a finite-epsilon perturbation needs an rng")
    if count_rng is None:
        count_rng = rng.spawn(1)[0]

    n = graph.num_nodes
    total_slots = n * (n - 1) // 2
    noisy_count = math.floor(graph.num_edges + laplace_sample(laplace_scale(EDGE_COUNT_SENSITIVITY, eps_r), count_rng))
    k = int(min(max(noisy_count, 0), total_slots))

    scale = laplace_scale(ADJACENCY_SENSITIVITY, eps - eps_r)
    edge_slots = encode_triangle_slots(n, graph.edge_array())
    best_values = np.empty(0, dtype=np.float64)
    best_slots = np.empty(0, dtype=np.int64)
    start = 0
    while start < total_slots:
        stop = min(start + _CHUNK_SLOTS, total_slots)
        values = laplace_noise(scale, stop - start, rng)
        inside = edge_slots[(edge_slots >= start) & (edge_slots < stop)]
        values[inside - start] += 1.0
        slots = np.arange(start, stop, dtype=np.int64)
        if k:
            best_values, best_slots = _top_slots(np.concatenate([best_values, values]),
                                                 np.concatenate([best_slots, slots]), k)
        start = stop

    selected = np.sort(best_slots)
    released = Graph.from_edges(n, decode_triangle_slots(n, selected))
    noisy = int(np.isin(selected, edge_slots, invert=True).sum())
    fraction = noisy / max(k, 1)
    logger.info(f"perturbed adjacency: |E|={graph.num_edges}, released {k} edges, noisy fraction {fraction:.3f} "
                f"(eps={eps:.6g}, eps_r={eps_r:.6g})")
    return PerturbedAdjacency(released, k, fraction, eps, eps_r)
