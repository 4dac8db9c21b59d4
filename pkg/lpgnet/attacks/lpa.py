from enum import Enum

import numpy as np
from sklearn.metrics.pairwise import paired_cosine_distances, paired_euclidean_distances

from lpgnet.utils.logger_config import make_logger
from .pairs import AttackError, EvalPairs
from .result import AttackKind, AttackResult

__all__ = ["SimilarityMetric", "lpa_scores", "pair_similarity"]

logger = make_logger("attacks.lpa")


class SimilarityMetric(Enum):
    Cosine = "cosine"
    Euclidean = "euclidean"
    Correlation = "correlation"


def _cosine(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    similarity = 1.0 - paired_cosine_distances(a, b)
    # a zero row has no direction
    degenerate = (np.linalg.norm(a, axis=1) == 0) | (np.linalg.norm(b, axis=1) == 0)
    similarity[degenerate] = 0.0
    return similarity


def pair_similarity(posteriors: np.ndarray, pairs: np.ndarray,
                    metric: SimilarityMetric = SimilarityMetric.Cosine) -> np.ndarray:
    metric = SimilarityMetric(metric) if not isinstance(metric, SimilarityMetric) else metric
    a = posteriors[pairs[:, 0]]
    b = posteriors[pairs[:, 1]]
    if metric is SimilarityMetric.Cosine:
        return _cosine(a, b)
    if metric is SimilarityMetric.Euclidean:
        return -paired_euclidean_distances(a, b)
    return _cosine(a - a.mean(axis=1, keepdims=True), b - b.mean(axis=1, keepdims=True))


def lpa_scores(posteriors: np.ndarray, pairs: EvalPairs, metric: SimilarityMetric = SimilarityMetric.Cosine,
               seed: int = 0) -> AttackResult:
    """Ranks pairs by the similarity of their posterior rows."""
    posteriors = np.asarray(posteriors, dtype=np.float64)
    table = pairs.pairs()
    if table.size and table.max() >= posteriors.shape[0]:
        raise AttackError(f"posteriors cover {posteriors.shape[0]} nodes, pairs reach node {int(table.max())}")
    scores = pair_similarity(posteriors, table, metric)
    metric = SimilarityMetric(metric) if not isinstance(metric, SimilarityMetric) else metric
    result = AttackResult.from_scores(AttackKind.Lpa, pairs, scores, seed, metric=metric.value)
    logger.info(f"lpa ({metric.value}): {pairs.num_pairs} pairs, auc={result.auc:.4f}")
    return result
