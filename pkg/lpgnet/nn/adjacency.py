from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from lpgnet.types import AdjacencyMode, Graph

__all__ = ["NormalizedAdjacency", "normalize_adjacency"]


@dataclass(frozen=True, eq=False)
class NormalizedAdjacency:
    """Symmetric sparse propagation matrix Ã used by GCN layers."""

    matrix: sp.csr_matrix
    mode: AdjacencyMode

    @property
    def num_nodes(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def identity(cls, num_nodes: int, mode: AdjacencyMode = AdjacencyMode.FirstOrderGcn) -> "NormalizedAdjacency":
        return cls(sp.identity(num_nodes, dtype=np.float64, format="csr"), mode)

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def _inverse_sqrt(values: np.ndarray) -> np.ndarray:
    out = np.zeros_like(values, dtype=np.float64)
    positive = values > 0
    out[positive] = 1.0 / np.sqrt(values[positive])
    return out


def normalize_adjacency(graph: Graph, mode: AdjacencyMode = AdjacencyMode.AugNormAdj) -> NormalizedAdjacency:
    """
    first_order_gcn: I + D^-1/2 A D^-1/2
    aug_norm_adj:    (D+I)^-1/2 A (D+I)^-1/2

    Isolated nodes get a zero off-diagonal row (and keep the identity
    diagonal under first_order_gcn).
    """
    adj = graph.to_sparse()
    degrees = graph.degrees().astype(np.float64)
    if mode is AdjacencyMode.FirstOrderGcn:
        scale = sp.diags(_inverse_sqrt(degrees))
        matrix = sp.identity(graph.num_nodes, dtype=np.float64, format="csr") + scale @ adj @ scale
    else:
        scale = sp.diags(_inverse_sqrt(degrees + 1.0))
        matrix = scale @ adj @ scale
    matrix = sp.csr_matrix(matrix, dtype=np.float64)
    matrix.sort_indices()
    return NormalizedAdjacency(matrix, mode)
