from dataclasses import dataclass, field
import itertools
import math

import numpy as np
from tqdm import tqdm

from lpgnet.graph import phase_views
from lpgnet.models import DEFAULT_EPS_R, train_model
from lpgnet.nn import TrainConfig
from lpgnet.types import Dataset, ModelKind, Setting
from lpgnet.utils.logger_config import make_logger
from .metrics import UtilityMetric, utility_score

__all__ = ["GridSearchResult", "enumerate_grid", "grid_search"]

logger = make_logger("evaluation.grid")


@dataclass
class GridSearchResult:
    best: TrainConfig
    best_score: float
    rows: list[dict] = field(default_factory=list)


def enumerate_grid(base: TrainConfig, grid: dict[str, list]) -> list[TrainConfig]:
    """Cartesian product of the grid in key order; every point patches `base`."""
    keys = list(grid)
    return [base.updated(**dict(zip(keys, values))) for values in itertools.product(*(grid[k] for k in keys))]


def grid_search(dataset: Dataset, kind: ModelKind, grid: dict[str, list], seed: int = 0,
                base: TrainConfig | None = None, setting: Setting = Setting.Transductive, nl: int = 1,
                metric: UtilityMetric = UtilityMetric.MicroF1, eps_r: float = DEFAULT_EPS_R,
                progress: bool = False) -> GridSearchResult:
    """
    Exhaustive non-private search: every grid point is trained at eps = inf
    and scored on the validation rows. The first point in enumeration order
    wins ties.
    """
    base = (base or TrainConfig()).with_seed(seed)
    candidates = enumerate_grid(base, grid)
    views = phase_views(dataset, setting)
    validation = views.validation
    truth = validation.labels[validation.rows]
    result = None
    rows = []
    for config in tqdm(candidates, desc=f"grid {kind.value}", disable=not progress, leave=False):
        model = train_model(kind, dataset, setting, math.inf, nl, config, eps_r)
        logits = model.predict_logits(validation)
        predictions = np.argmax(logits[validation.rows], axis=1)
        score = utility_score(metric, predictions, truth, dataset.num_classes)
        rows.append({**{k: config.to_record()[k] for k in grid}, "val_score": score})
        if result is None or score > result.best_score:
            result = GridSearchResult(best=config, best_score=score)
    result.rows = rows
    logger.info(f"grid search for {kind.value}: {len(candidates)} points, best val score {result.best_score:.4f} "
                f"with {{{', '.join(f'{k}={result.best.to_record()[k]}' for k in grid)}}}")
    return result
