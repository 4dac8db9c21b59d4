# Link-stealing attacks against black-box node classifiers and their
# evaluation protocol (pair sampling, rank-based AUC)

from .linkteller import *
from .lpa import *
from .pairs import *
from .result import *

__all__ = ["PairMode", "DegreeBand", "EvalPairs", "AttackError", "PairSamplingError", "sample_eval_pairs", "band_nodes",
           "AttackKind", "AttackResult", "auc", "PAIR_COLUMNS",
           "linkteller_scores", "influence_matrix", "DEFAULT_DELTA",
           "SimilarityMetric", "lpa_scores", "pair_similarity"]
