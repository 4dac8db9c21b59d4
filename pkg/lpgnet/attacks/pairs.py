from dataclasses import dataclass
from enum import Enum

import numpy as np

from lpgnet.types import Graph, encode_triangle_slots, decode_triangle_slots
from lpgnet.utils.errors import LpgnetError
from lpgnet.utils.logger_config import make_logger
from lpgnet.utils.seeding import derive_rng

__all__ = ["PairMode", "DegreeBand", "EvalPairs", "AttackError", "PairSamplingError",
           "sample_eval_pairs", "band_nodes"]

logger = make_logger("attacks.pairs")

# below this many candidate pairs non-edges are enumerated instead of rejection-sampled
_ENUMERATE_LIMIT = 1 << 18


class AttackError(LpgnetError):
    pass


class PairSamplingError(AttackError, ValueError):
    pass


class PairMode(Enum):
    TransductiveSampled = "transductive_sampled"
    InductiveSubgraph = "inductive_subgraph"


class DegreeBand(Enum):
    All = "all"
    Low = "low"
    High = "high"


@dataclass(frozen=True, eq=False)
class EvalPairs:
    """Edge pairs and non-edge pairs, each row (u, v) with u < v."""

    positives: np.ndarray
    negatives: np.ndarray
    mode: PairMode
    degree_band: DegreeBand = DegreeBand.All

    def __post_init__(self):
        for name in ("positives", "negatives"):
            pairs = np.asarray(getattr(self, name), dtype=np.int64).reshape(-1, 2)
            if (pairs[:, 0] == pairs[:, 1]).any():
                raise PairSamplingError(f"{name} contain a self-pair")
            object.__setattr__(self, name, pairs)

    @property
    def num_positives(self) -> int:
        return int(self.positives.shape[0])

    @property
    def num_negatives(self) -> int:
        return int(self.negatives.shape[0])

    @property
    def num_pairs(self) -> int:
        return self.num_positives + self.num_negatives

    def pairs(self) -> np.ndarray:
        return np.concatenate([self.positives, self.negatives], axis=0)

    def labels(self) -> np.ndarray:
        return np.concatenate([np.ones(self.num_positives, dtype=bool), np.zeros(self.num_negatives, dtype=bool)])

    def endpoints(self) -> np.ndarray:
        return np.unique(self.pairs())


def band_nodes(graph: Graph, nodes: np.ndarray, band: DegreeBand, band_size: int) -> np.ndarray:
    """The band_size lowest- or highest-degree nodes of `nodes` (ties by node id)."""
    if band is DegreeBand.All:
        return nodes
    degrees = graph.degrees()[nodes]
    order = np.lexsort((nodes, degrees)) if band is DegreeBand.Low else np.lexsort((nodes, -degrees))
    picked = np.sort(nodes[order[:band_size]])
    if picked.size < band_size:
        logger.warning(f"{band.value}-degree band holds only {picked.size} of the requested {band_size} nodes")
    return picked


def _sort_pairs(pairs: np.ndarray) -> np.ndarray:
    pairs = np.sort(pairs, axis=1)
    return pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]


def _sample_edges(graph: Graph, in_pool: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    edges = graph.edge_array()
    candidates = edges[in_pool[edges[:, 0]] | in_pool[edges[:, 1]]]
    if candidates.shape[0] < k:
        raise PairSamplingError(f"need {k} edges, only {candidates.shape[0]} available")
    return candidates[rng.choice(candidates.shape[0], size=k, replace=False)]


def _sample_non_edges(graph: Graph, pool: np.ndarray, in_pool: np.ndarray, k: int,
                      rng: np.random.Generator) -> np.ndarray:
    n, p = graph.num_nodes, pool.size
    touching_pairs = p * (n - 1) - p * (p - 1) // 2
    edges = graph.edge_array()
    touching_edges = int((in_pool[edges[:, 0]] | in_pool[edges[:, 1]]).sum())
    available = touching_pairs - touching_edges
    if available < k:
        raise PairSamplingError(f"need {k} non-edges, only {available} available")
    edge_slots = encode_triangle_slots(n, edges)

    if touching_pairs <= _ENUMERATE_LIMIT:
        u = np.repeat(pool, n)
        v = np.tile(np.arange(n, dtype=np.int64), p)
        distinct = u != v
        pairs = np.stack([np.minimum(u, v)[distinct], np.maximum(u, v)[distinct]], axis=1)
        slots = np.unique(encode_triangle_slots(n, pairs))
        candidates = decode_triangle_slots(n, slots[~np.isin(slots, edge_slots)])
        return candidates[rng.choice(candidates.shape[0], size=k, replace=False)]

    edge_set = set(edge_slots.tolist())
    chosen: dict[int, None] = {}
    while len(chosen) < k:
        u = int(pool[rng.integers(p)])
        v = int(rng.integers(n))
        if u == v:
            continue
        # a pair inside the pool is reachable from either endpoint
        if in_pool[v] and rng.random() < 0.5:
            continue
        slot = int(encode_triangle_slots(n, np.array([[min(u, v), max(u, v)]]))[0])
        if slot in edge_set or slot in chosen:
            continue
        chosen[slot] = None
    return decode_triangle_slots(n, np.fromiter(chosen, dtype=np.int64))


def sample_eval_pairs(graph: Graph, mode: PairMode, k: int, degree_band: DegreeBand = DegreeBand.All, seed: int = 0,
                      nodes=None, band_size: int = 500) -> EvalPairs:
    """
    Attack evaluation pairs.

    transductive_sampled: k edges and k non-edges, uniform without
    replacement. inductive_subgraph: k nodes, then every pair inside the
    sample split by edge existence. `nodes` limits the candidate nodes
    (e.g. the test nodes); a degree band keeps only the band_size lowest or
    highest-degree candidates.
    """
    mode = PairMode(mode) if not isinstance(mode, PairMode) else mode
    degree_band = DegreeBand(degree_band) if not isinstance(degree_band, DegreeBand) else degree_band
    if k < 1:
        raise PairSamplingError(f"k must be positive, got {k}")
    rng = derive_rng(seed, "pairs")
    pool = np.arange(graph.num_nodes, dtype=np.int64) if nodes is None else np.unique(np.asarray(nodes, np.int64))
    pool = band_nodes(graph, pool, degree_band, band_size)
    in_pool = np.zeros(graph.num_nodes, dtype=bool)
    in_pool[pool] = True

    if mode is PairMode.TransductiveSampled:
        positives = _sample_edges(graph, in_pool, k, rng)
        negatives = _sample_non_edges(graph, pool, in_pool, k, rng)
    else:
        if pool.size < k:
            raise PairSamplingError(f"need {k} nodes, only {pool.size} available")
        sample = np.sort(rng.choice(pool, size=k, replace=False))
        rows, cols = np.triu_indices(k, k=1)
        pairs = np.stack([sample[rows], sample[cols]], axis=1)
        edge_slots = encode_triangle_slots(graph.num_nodes, graph.edge_array())
        is_edge = np.isin(encode_triangle_slots(graph.num_nodes, pairs), edge_slots)
        positives, negatives = pairs[is_edge], pairs[~is_edge]

    result = EvalPairs(_sort_pairs(positives), _sort_pairs(negatives), mode, degree_band)
    logger.debug(f"sampled {result.num_positives} edges and {result.num_negatives} non-edges "
                 f"({mode.value}, band {degree_band.value})")
    return result
