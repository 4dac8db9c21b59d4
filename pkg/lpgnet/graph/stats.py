from dataclasses import dataclass

import numpy as np

from lpgnet.types import Graph, GraphError, RecordMixin

__all__ = ["HomophilyProfile", "GraphStats", "homophily_profile", "graph_stats"]


@dataclass(frozen=True, eq=False)
class HomophilyProfile:
    """
    per_node_score[v] is NaN for isolated nodes (flagged by `defined`);
    per_cluster_avg[c] is NaN when cluster c has no non-isolated node.
    """

    per_cluster_avg: np.ndarray
    per_node_score: np.ndarray
    defined: np.ndarray
    cluster_sizes: np.ndarray

    def to_rows(self, source: str) -> list[dict]:
        return [
            {"source": source, "cluster": c, "nodes": int(self.cluster_sizes[c]),
             "avg_homophily": float(self.per_cluster_avg[c])}
            for c in range(self.per_cluster_avg.shape[0])
        ]


@dataclass(frozen=True)
class GraphStats(RecordMixin):
    nodes: int
    edges: int
    density: float


def homophily_profile(graph: Graph, labels, num_classes: int | None = None) -> HomophilyProfile:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (graph.num_nodes,):
        raise GraphError(f"expected {graph.num_nodes} labels, got {labels.shape[0]}")
    if num_classes is None:
        num_classes = int(labels.max()) + 1 if labels.size else 0
    degrees = graph.degrees()
    src = np.repeat(np.arange(graph.num_nodes), degrees)
    same = (labels[src] == labels[graph.neighbor_ids]).astype(np.int64)
    same_counts = np.bincount(src, weights=same, minlength=graph.num_nodes)

    defined = degrees > 0
    per_node = np.full(graph.num_nodes, np.nan)
    per_node[defined] = same_counts[defined] / degrees[defined]

    sizes = np.bincount(labels[defined], minlength=num_classes)
    sums = np.bincount(labels[defined], weights=per_node[defined], minlength=num_classes)
    per_cluster = np.full(num_classes, np.nan)
    nonempty = sizes > 0
    per_cluster[nonempty] = sums[nonempty] / sizes[nonempty]
    return HomophilyProfile(per_cluster_avg=per_cluster, per_node_score=per_node,
                            defined=defined, cluster_sizes=sizes)


def graph_stats(graph: Graph) -> GraphStats:
    n = graph.num_nodes
    if n < 2:
        raise GraphError(f"density needs at least two nodes, got {n}")
    return GraphStats(nodes=n, edges=graph.num_edges, density=2.0 * graph.num_edges / (n * (n - 1)))
