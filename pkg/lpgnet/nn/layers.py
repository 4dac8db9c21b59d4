from dataclasses import dataclass, field
import json
from pathlib import Path

import numpy as np
from scipy.special import log_softmax, softmax as _softmax

from lpgnet.utils.errors import ShapeError
from .adjacency import NormalizedAdjacency

__all__ = ["MlpModel", "GcnModel", "mlp_forward", "gcn_forward", "network_forward", "softmax", "cross_entropy",
           "loss_and_gradients", "save_checkpoint", "load_checkpoint"]


def softmax(logits: np.ndarray) -> np.ndarray:
    return _softmax(logits, axis=1)


def cross_entropy(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean negative log-likelihood of `labels` under softmax(logits)."""
    if logits.shape[0] == 0:
        raise ShapeError("cross-entropy needs at least one row", expected=">= 1 rows", actual=0)
    log_p = log_softmax(logits, axis=1)
    return float(-np.mean(log_p[np.arange(logits.shape[0]), labels]))


def _glorot(fan_in: int, fan_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


@dataclass(eq=False)
class MlpModel:
    """
    Stack of dense layers: hid_n hidden layers of width hid_s with ReLU and
    inverted dropout, then a linear output layer to C logits.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    dropout: float
    history: object = field(default=None, repr=False)

    kind = "mlp"

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ShapeError("weights and biases must pair up", expected=len(self.weights), actual=len(self.biases))
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            if b.shape != (w.shape[1],):
                raise ShapeError(f"bias {i} does not match weight {i}", expected=(w.shape[1],), actual=b.shape)
            if i and self.weights[i - 1].shape[1] != w.shape[0]:
                raise ShapeError(f"layer {i} input does not chain", expected=self.weights[i - 1].shape[1],
                                 actual=w.shape[0])

    @classmethod
    def initialize(cls, input_dim: int, hid_s: int, hid_n: int, num_classes: int, dropout: float,
                   rng: np.random.Generator):
        """Glorot-uniform weights, zero biases."""
        dims = [input_dim] + [hid_s] * hid_n + [num_classes]
        weights = [_glorot(dims[i], dims[i + 1], rng) for i in range(len(dims) - 1)]
        biases = [np.zeros(dims[i + 1]) for i in range(len(dims) - 1)]
        return cls(weights=weights, biases=biases, dropout=dropout)

    @property
    def input_dim(self) -> int:
        return int(self.weights[0].shape[0])

    @property
    def num_classes(self) -> int:
        return int(self.weights[-1].shape[1])

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def parameters(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def set_parameters(self, params: list[np.ndarray]):
        self.weights = list(params[0::2])
        self.biases = list(params[1::2])

    def copy(self):
        return type(self)(weights=[w.copy() for w in self.weights], biases=[b.copy() for b in self.biases],
                          dropout=self.dropout)

    def to_record(self) -> dict:
        return {
            "kind": self.kind,
            "dropout": self.dropout,
            "shapes": [list(w.shape) for w in self.weights],
            "weights": [w.ravel().tolist() for w in self.weights],
            "biases": [b.tolist() for b in self.biases],
        }

    @staticmethod
    def from_record(record: dict) -> "MlpModel":
        model_cls = GcnModel if record.get("kind") == GcnModel.kind else MlpModel
        weights = [np.asarray(flat, dtype=np.float64).reshape(shape)
                   for flat, shape in zip(record["weights"], record["shapes"])]
        biases = [np.asarray(b, dtype=np.float64) for b in record["biases"]]
        return model_cls(weights=weights, biases=biases, dropout=float(record["dropout"]))


class GcnModel(MlpModel):
    """Same parameters as MlpModel; every layer propagates through Ã."""

    kind = "gcn"


def _check_input(model: MlpModel, features: np.ndarray) -> None:
    if features.ndim != 2 or features.shape[1] != model.input_dim:
        raise ShapeError("feature matrix does not match the model input", expected=model.input_dim,
                         actual=features.shape[1] if features.ndim == 2 else features.shape)


def _forward(model: MlpModel, features, adjacency: NormalizedAdjacency | None, training: bool,
             rng: np.random.Generator | None):
    _check_input(model, features)
    if adjacency is not None and adjacency.num_nodes != features.shape[0]:
        raise ShapeError("adjacency does not match the feature rows", expected=features.shape[0],
                         actual=adjacency.num_nodes)
    drop = training and model.dropout > 0
    if drop and rng is None:
        raise ValueError("training-mode dropout needs an rng")
    h = np.asarray(features, dtype=np.float64)
    cache = []
    last = model.num_layers - 1
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w
        if adjacency is not None:
            z = adjacency.matrix @ z
        z = z + b
        mask = None
        if i < last:
            out = np.maximum(z, 0.0)
            if drop:
                mask = (rng.random(out.shape) >= model.dropout) / (1.0 - model.dropout)
                out = out * mask
        else:
            out = z
        cache.append((h, z, mask))
        h = out
    return h, cache


def mlp_forward(model: MlpModel, features: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None) -> np.ndarray:
    logits, _ = _forward(model, features, None, training, rng)
    return logits


def network_forward(model: MlpModel, features: np.ndarray, adjacency: NormalizedAdjacency | None = None,
                    training: bool = False, rng: np.random.Generator | None = None) -> np.ndarray:
    """MLP pass when `adjacency` is None, GCN pass otherwise."""
    logits, _ = _forward(model, features, adjacency, training, rng)
    return logits


def gcn_forward(model: MlpModel, adjacency: NormalizedAdjacency, features: np.ndarray, training: bool = False,
                rng: np.random.Generator | None = None) -> np.ndarray:
    logits, _ = _forward(model, features, adjacency, training, rng)
    return logits


def loss_and_gradients(model: MlpModel, features: np.ndarray, labels: np.ndarray, rows: np.ndarray,
                       adjacency: NormalizedAdjacency | None = None, training: bool = False,
                       rng: np.random.Generator | None = None):
    """
    Mean cross-entropy over `rows` and its exact gradient for every parameter.

    `labels` is indexed like the feature rows. Gradients come back in
    `model.parameters()` order, without weight decay.
    """
    rows = np.asarray(rows, dtype=np.int64)
    logits, cache = _forward(model, features, adjacency, training, rng)
    target = labels[rows]
    loss = cross_entropy(logits[rows], target)

    d = np.zeros_like(logits)
    probs = softmax(logits[rows])
    probs[np.arange(rows.shape[0]), target] -= 1.0
    d[rows] = probs / rows.shape[0]

    grads: list[np.ndarray] = []
    last = model.num_layers - 1
    for i in range(last, -1, -1):
        h, z, mask = cache[i]
        if i < last:
            if mask is not None:
                d = d * mask
            d = d * (z > 0)
        grad_b = d.sum(axis=0)
        if adjacency is not None:
            d = adjacency.matrix.T @ d
        grad_w = h.T @ d
        grads.append(grad_b)
        grads.append(grad_w)
        if i:
            d = d @ model.weights[i].T
    grads.reverse()
    return loss, grads


def save_checkpoint(model: MlpModel, path) -> None:
    with open(Path(path), "w", encoding="utf-8") as f:
        json.dump(model.to_record(), f)


def load_checkpoint(path) -> MlpModel:
    with open(Path(path), "r", encoding="utf-8") as f:
        return MlpModel.from_record(json.load(f))
