from enum import Enum

import numpy as np
from sklearn.metrics import f1_score

from lpgnet.utils.errors import LpgnetError

__all__ = ["MetricError", "UtilityMetric", "micro_f1", "rare_f1", "utility_score", "minority_class"]


class MetricError(LpgnetError, ValueError):
    pass


class UtilityMetric(Enum):
    MicroF1 = "micro_f1"
    RareF1 = "rare_f1"


def _vectors(predictions, truth) -> tuple[np.ndarray, np.ndarray]:
    predictions = np.asarray(predictions, dtype=np.int64).reshape(-1)
    truth = np.asarray(truth, dtype=np.int64).reshape(-1)
    if predictions.shape != truth.shape:
        raise MetricError(f"length mismatch: {predictions.shape[0]} predictions, {truth.shape[0]} labels")
    if truth.size == 0:
        raise MetricError("metrics need at least one sample")
    return predictions, truth


def micro_f1(predictions, truth, num_classes: int) -> float:
    """Micro-averaged F1 over classes 0..num_classes-1."""
    predictions, truth = _vectors(predictions, truth)
    for name, values in (("predictions", predictions), ("labels", truth)):
        if values.min() < 0 or values.max() >= num_classes:
            raise MetricError(f"{name} outside [0, {num_classes})")
    return float(f1_score(truth, predictions, labels=list(range(num_classes)), average="micro", zero_division=0))


def minority_class(truth) -> int:
    """The rarer of classes 0 and 1 in `truth`; equal counts pick 1."""
    truth = np.asarray(truth, dtype=np.int64)
    counts = np.bincount(truth, minlength=2)
    return 0 if counts[0] < counts[1] else 1


def rare_f1(predictions, truth) -> float:
    """Binary F1 with the minority class of `truth` as the positive class."""
    predictions, truth = _vectors(predictions, truth)
    if not (np.isin(truth, (0, 1)).all() and np.isin(predictions, (0, 1)).all()):
        raise MetricError("rare-class F1 needs binary labels")
    positive = minority_class(truth)
    return float(f1_score(truth, predictions, pos_label=positive, average="binary", zero_division=0))


def utility_score(metric: UtilityMetric, predictions, truth, num_classes: int) -> float:
    if metric is UtilityMetric.RareF1:
        return rare_f1(predictions, truth)
    return micro_f1(predictions, truth, num_classes)
