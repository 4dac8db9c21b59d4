from dataclasses import dataclass
import hashlib

import numpy as np
import scipy.sparse as sp

from lpgnet.utils.errors import LpgnetError


class GraphError(LpgnetError, ValueError):
    pass


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Graph:
    """
    Undirected, unweighted graph in CSR form with both edge directions stored.

    Neighbor lists are sorted ascending and duplicate-free; there are no
    self-loops. Instances are immutable; build them with `from_edges`.
    """

    num_nodes: int
    row_offsets: np.ndarray
    neighbor_ids: np.ndarray

    def __post_init__(self):
        if self.num_nodes < 0:
            raise GraphError(f"num_nodes must be non-negative, got {self.num_nodes}")
        if self.row_offsets.shape != (self.num_nodes + 1,):
            raise GraphError(f"row_offsets must have length {self.num_nodes + 1}")
        if int(self.row_offsets[-1]) != self.neighbor_ids.shape[0]:
            raise GraphError("row_offsets do not cover neighbor_ids")
        object.__setattr__(self, "row_offsets", _frozen(self.row_offsets.astype(np.int64, copy=False)))
        object.__setattr__(self, "neighbor_ids", _frozen(self.neighbor_ids.astype(np.int64, copy=False)))

    @classmethod
    def from_edges(cls, num_nodes: int, edges) -> "Graph":
        """
        Builds a graph from (u, v) pairs.

        Duplicate and reversed pairs collapse to one undirected edge.
        Self-loops and ids outside [0, num_nodes) raise GraphError.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if edges.min() < 0 or edges.max() >= num_nodes:
                bad = edges[(edges < 0).any(axis=1) | (edges >= num_nodes).any(axis=1)][0]
                raise GraphError(f"edge ({bad[0]}, {bad[1]}) references a node outside [0, {num_nodes})")
            loops = edges[:, 0] == edges[:, 1]
            if loops.any():
                node = int(edges[loops][0, 0])
                raise GraphError(f"self-loop on node {node}")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        undirected = np.unique(np.stack([lo, hi], axis=1), axis=0) if edges.size else edges
        src = np.concatenate([undirected[:, 0], undirected[:, 1]])
        dst = np.concatenate([undirected[:, 1], undirected[:, 0]])
        order = np.lexsort((dst, src))
        src, dst = src[order], dst[order]
        counts = np.bincount(src, minlength=num_nodes)
        row_offsets = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=row_offsets[1:])
        return cls(num_nodes=int(num_nodes), row_offsets=row_offsets, neighbor_ids=dst)

    @classmethod
    def empty(cls, num_nodes: int) -> "Graph":
        return cls.from_edges(num_nodes, np.empty((0, 2), dtype=np.int64))

    @property
    def num_edges(self) -> int:
        return int(self.neighbor_ids.shape[0] // 2)

    def degrees(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def neighbors(self, node: int) -> np.ndarray:
        return self.neighbor_ids[self.row_offsets[node]:self.row_offsets[node + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        pos = np.searchsorted(row, v)
        return bool(pos < row.shape[0] and row[pos] == v)

    def edge_array(self) -> np.ndarray:
        """Undirected edges as an (E, 2) array with u < v, sorted by (u, v)."""
        src = np.repeat(np.arange(self.num_nodes, dtype=np.int64), self.degrees())
        keep = src < self.neighbor_ids
        return np.stack([src[keep], self.neighbor_ids[keep]], axis=1)

    def to_sparse(self) -> sp.csr_matrix:
        data = np.ones(self.neighbor_ids.shape[0], dtype=np.float64)
        return sp.csr_matrix(
            (data, self.neighbor_ids.copy(), self.row_offsets.copy()),
            shape=(self.num_nodes, self.num_nodes),
        )

    def induced(self, nodes) -> "Graph":
        """Subgraph on `nodes`, relabelled to 0..len(nodes)-1 in the given order."""
        nodes = np.asarray(nodes, dtype=np.int64)
        position = np.full(self.num_nodes, -1, dtype=np.int64)
        position[nodes] = np.arange(nodes.shape[0])
        edges = self.edge_array()
        mapped = position[edges]
        keep = (mapped >= 0).all(axis=1)
        return Graph.from_edges(nodes.shape[0], mapped[keep])

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        digest.update(np.int64(self.num_nodes).tobytes())
        digest.update(self.row_offsets.tobytes())
        digest.update(self.neighbor_ids.tobytes())
        return digest.hexdigest()[:16]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.num_nodes == other.num_nodes
            and np.array_equal(self.row_offsets, other.row_offsets)
            and np.array_equal(self.neighbor_ids, other.neighbor_ids)
        )

    def __hash__(self) -> int:
        return hash(self.fingerprint())

    def __repr__(self) -> str:
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


def triangle_row_offsets(num_nodes: int) -> np.ndarray:
    """First strict-upper-triangle slot of every row, slots numbered row-major."""
    rows = np.arange(num_nodes, dtype=np.int64)
    return rows * (num_nodes - 1) - rows * (rows - 1) // 2


def encode_triangle_slots(num_nodes: int, edges: np.ndarray) -> np.ndarray:
    """Slot index of each (u, v) pair with u < v."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return triangle_row_offsets(num_nodes)[edges[:, 0]] + edges[:, 1] - edges[:, 0] - 1


def decode_triangle_slots(num_nodes: int, slots) -> np.ndarray:
    """Inverse of encode_triangle_slots: an (S, 2) array of (u, v) with u < v."""
    slots = np.asarray(slots, dtype=np.int64)
    offsets = triangle_row_offsets(num_nodes)
    u = np.searchsorted(offsets, slots, side="right") - 1
    v = slots - offsets[u] + u + 1
    return np.stack([u, v], axis=1)
