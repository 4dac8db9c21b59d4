import numpy as np
from tqdm import tqdm

from lpgnet.utils.logger_config import make_logger
from .pairs import AttackError, EvalPairs
from .result import AttackKind, AttackResult

__all__ = ["linkteller_scores", "influence_matrix", "DEFAULT_DELTA"]

logger = make_logger("attacks.linkteller")

DEFAULT_DELTA = 1e-4


def _query(oracle, features: np.ndarray) -> np.ndarray:
    try:
        posteriors = np.asarray(oracle(features), dtype=np.float64)
    except Exception as e:
        raise AttackError(f"oracle query failed: {e}") from e
    if posteriors.ndim != 2 or posteriors.shape[0] != features.shape[0]:
        raise AttackError(f"oracle returned shape {posteriors.shape} for {features.shape[0]} nodes")
    return posteriors


def influence_matrix(oracle, features: np.ndarray, targets, delta: float = DEFAULT_DELTA,
                     progress: bool = False) -> dict[int, np.ndarray]:
    """
    For every target v: ‖(P′_u − P_u) / delta‖₂ for all nodes u, where P′ is
    the posterior after scaling row v of the features by (1 + delta).
    One oracle query per target.
    """
    if not delta > 0:
        raise AttackError(f"delta must be positive, got {delta}")
    features = np.asarray(features, dtype=np.float64)
    base = _query(oracle, features)
    influence: dict[int, np.ndarray] = {}
    for v in tqdm(np.asarray(targets, dtype=np.int64), desc="linkteller", disable=not progress, leave=False):
        perturbed = features.copy()
        perturbed[v] = perturbed[v] * (1.0 + delta)
        change = (_query(oracle, perturbed) - base) / delta
        influence[int(v)] = np.linalg.norm(change, axis=1)
    return influence


def linkteller_scores(oracle, features: np.ndarray, pairs: EvalPairs, delta: float = DEFAULT_DELTA, seed: int = 0,
                      progress: bool = False) -> AttackResult:
    """score(u, v) = max(influence of v on u, influence of u on v)."""
    table = pairs.pairs()
    influence = influence_matrix(oracle, features, pairs.endpoints(), delta, progress)
    scores = np.array([max(influence[int(v)][u], influence[int(u)][v]) for u, v in table], dtype=np.float64)
    result = AttackResult.from_scores(AttackKind.LinkTeller, pairs, scores, seed, delta=delta)
    logger.info(f"linkteller: {pairs.num_pairs} pairs, {len(influence)} queries, auc={result.auc:.4f}")
    return result
