from dataclasses import dataclass, field, fields, replace
import math

import numpy as np
from sklearn.metrics import f1_score

from lpgnet.types import AdjacencyMode, RecordMixin, SelectionMode, parse_enum
from lpgnet.utils.errors import ConfigError, LpgnetError, ShapeError
from lpgnet.utils.logger_config import make_logger
from lpgnet.utils.seeding import derive_rng
from .adjacency import NormalizedAdjacency
from .layers import GcnModel, MlpModel, cross_entropy, loss_and_gradients, network_forward
from .optim import Adam

__all__ = ["TrainConfig", "TrainingData", "TrainingHistory", "TrainingDivergedError",
           "fit_network", "train_mlp", "train_gcn"]

logger = make_logger("nn.train")


class TrainingDivergedError(LpgnetError):
    def __init__(self, epoch: int, loss: float):
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"training diverged at epoch {epoch}: loss = {loss}")


@dataclass(frozen=True)
class TrainConfig(RecordMixin):
    lr: float = 0.01
    dropout: float = 0.5
    hid_s: int = 64
    hid_n: int = 2
    epochs: int = 500
    weight_decay: float = 5e-4
    seed: int = 0
    select_by: SelectionMode = SelectionMode.ValF1
    adjacency: AdjacencyMode = AdjacencyMode.AugNormAdj

    def __post_init__(self):
        if not self.lr > 0:
            raise ConfigError(f"lr must be positive, got {self.lr}")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must lie in [0, 1), got {self.dropout}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if self.hid_n < 0 or self.hid_s < 1:
            raise ConfigError(f"invalid hidden layout hid_n={self.hid_n}, hid_s={self.hid_s}")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be non-negative, got {self.weight_decay}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")

    @classmethod
    def from_dict(cls, data: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown training option(s): {', '.join(unknown)}")
        values = dict(data)
        try:
            for name in ("lr", "dropout", "weight_decay"):
                if name in values:
                    values[name] = float(values[name])
            for name in ("hid_s", "hid_n", "epochs", "seed"):
                if name in values:
                    values[name] = int(values[name])
            if "select_by" in values:
                values["select_by"] = parse_enum(SelectionMode, values["select_by"])
            if "adjacency" in values:
                values["adjacency"] = parse_enum(AdjacencyMode, values["adjacency"])
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid training option: {e}") from e
        return cls(**values)

    def updated(self, **changes) -> "TrainConfig":
        return TrainConfig.from_dict({**self.to_record(), **changes})

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)


@dataclass(frozen=True, eq=False)
class TrainingData:
    """Feature rows, labels indexed like them, the rows that count, and Ã for GCN passes."""

    features: np.ndarray
    labels: np.ndarray
    rows: np.ndarray
    adjacency: NormalizedAdjacency | None = None

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=np.float64))
        object.__setattr__(self, "labels", np.asarray(self.labels, dtype=np.int64))
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=np.int64))
        if self.labels.shape[0] != self.features.shape[0]:
            raise ShapeError("labels must cover every feature row", expected=self.features.shape[0],
                             actual=self.labels.shape[0])

    @classmethod
    def dense(cls, features, labels) -> "TrainingData":
        features = np.asarray(features, dtype=np.float64)
        return cls(features, labels, np.arange(features.shape[0]))

    def logits(self, model: MlpModel) -> np.ndarray:
        return network_forward(model, self.features, self.adjacency)


@dataclass
class TrainingHistory(RecordMixin):
    select_by: SelectionMode
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    score: list[float] = field(default_factory=list)
    best_epoch: int = 0
    best_score: float = -math.inf


def _micro_f1(truth: np.ndarray, predictions: np.ndarray, num_classes: int) -> float:
    return float(f1_score(truth, predictions, labels=list(range(num_classes)), average="micro", zero_division=0))


def fit_network(model_cls: type[MlpModel], train: TrainingData, validation: TrainingData | None,
                config: TrainConfig, num_classes: int, keys: tuple = ()) -> MlpModel:
    """
    Full-batch training for config.epochs epochs.

    After every epoch the model is scored per config.select_by; the returned
    model is the snapshot with the best score (earliest epoch on ties) and
    carries its TrainingHistory.
    """
    if train.rows.size == 0:
        raise ShapeError("no training rows", expected=">= 1", actual=0)
    if model_cls is GcnModel and train.adjacency is None:
        raise ShapeError("a GCN needs a normalized adjacency", expected="NormalizedAdjacency", actual=None)
    select_by = config.select_by
    if select_by is not SelectionMode.TrainLoss and (validation is None or validation.rows.size == 0):
        logger.warning(f"no validation rows; selecting by {SelectionMode.TrainLoss.value} instead")
        select_by = SelectionMode.TrainLoss
        validation = None

    init_rng = derive_rng(config.seed, "init", *keys)
    dropout_rng = derive_rng(config.seed, "dropout", *keys)
    model = model_cls.initialize(train.features.shape[1], config.hid_s, config.hid_n, num_classes,
                                 config.dropout, init_rng)
    optimizer = Adam(model.parameters(), lr=config.lr, weight_decay=config.weight_decay)
    history = TrainingHistory(select_by=select_by)
    best = model.copy()

    for epoch in range(1, config.epochs + 1):
        loss, grads = loss_and_gradients(model, train.features, train.labels, train.rows, train.adjacency,
                                         training=True, rng=dropout_rng)
        if not math.isfinite(loss):
            raise TrainingDivergedError(epoch, loss)
        model.set_parameters(optimizer.step(model.parameters(), grads))
        history.train_loss.append(loss)

        val_loss = math.nan
        if validation is not None:
            logits = validation.logits(model)[validation.rows]
            truth = validation.labels[validation.rows]
            val_loss = cross_entropy(logits, truth)
            if select_by is SelectionMode.ValF1:
                score = _micro_f1(truth, np.argmax(logits, axis=1), num_classes)
            else:
                score = -val_loss
        else:
            score = -cross_entropy(train.logits(model)[train.rows], train.labels[train.rows])
        history.val_loss.append(val_loss)
        history.score.append(score)
        if score > history.best_score:
            history.best_score = score
            history.best_epoch = epoch
            best = model.copy()
        logger.debug(f"epoch {epoch}: loss={loss:.5f} val_loss={val_loss:.5f} {select_by.value}={score:.5f}")

    logger.info(f"trained {model_cls.kind} ({config.hid_n}x{config.hid_s}, {config.epochs} epochs): "
                f"best {select_by.value}={history.best_score:.4f} at epoch {history.best_epoch}")
    best.history = history
    return best


def train_mlp(features, labels, val_features, val_labels, config: TrainConfig, num_classes: int | None = None,
              keys: tuple = ()) -> MlpModel:
    """Trains an MLP on (features, labels) and selects on (val_features, val_labels)."""
    train = TrainingData.dense(features, labels)
    validation = None
    if val_features is not None and len(val_features):
        validation = TrainingData.dense(val_features, val_labels)
    if num_classes is None:
        num_classes = int(max(train.labels.max(), validation.labels.max() if validation else 0)) + 1
    return fit_network(MlpModel, train, validation, config, num_classes, keys)


def train_gcn(train: TrainingData, validation: TrainingData | None, config: TrainConfig, num_classes: int,
              keys: tuple = ()) -> GcnModel:
    """Semi-supervised full-graph training; the loss covers train.rows only."""
    return fit_network(GcnModel, train, validation, config, num_classes, keys)
