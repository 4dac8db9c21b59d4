from dataclasses import dataclass

import numpy as np

from lpgnet.utils.errors import LpgnetError
from .graph import Graph, _frozen


class DatasetError(LpgnetError, ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        for name in ("train", "val", "test"):
            ids = np.asarray(getattr(self, name), dtype=np.int64).reshape(-1)
            object.__setattr__(self, name, _frozen(ids))

    def validate(self, num_nodes: int):
        seen = np.zeros(num_nodes, dtype=bool)
        for name in ("train", "val", "test"):
            ids = getattr(self, name)
            if ids.size and (ids.min() < 0 or ids.max() >= num_nodes):
                raise DatasetError(f"{name} split references a node outside [0, {num_nodes})")
            if np.unique(ids).shape[0] != ids.shape[0]:
                raise DatasetError(f"{name} split repeats a node id")
            if seen[ids].any():
                node = int(ids[seen[ids]][0])
                raise DatasetError(f"split sets overlap at node {node}")
            seen[ids] = True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Split):
            return NotImplemented
        return all(np.array_equal(getattr(self, n), getattr(other, n)) for n in ("train", "val", "test"))

    def to_record(self) -> dict:
        return {"train": self.train.tolist(), "val": self.val.tolist(), "test": self.test.tolist()}


@dataclass(frozen=True, eq=False)
class Dataset:
    """Graph plus dense N×F features, integer labels in [0, C) and a disjoint split."""

    graph: Graph
    features: np.ndarray
    labels: np.ndarray
    split: Split
    num_classes: int

    def __post_init__(self):
        n = self.graph.num_nodes
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2 or features.shape[0] != n:
            raise DatasetError(f"features must be a {n}×F matrix, got shape {features.shape}")
        if not np.isfinite(features).all():
            raise DatasetError("features contain non-finite values")
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if labels.shape[0] != n:
            raise DatasetError(f"expected {n} labels, got {labels.shape[0]}")
        if self.num_classes < 1:
            raise DatasetError(f"num_classes must be positive, got {self.num_classes}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.num_classes):
            bad = int(labels[(labels < 0) | (labels >= self.num_classes)][0])
            raise DatasetError(f"label {bad} outside [0, {self.num_classes})")
        self.split.validate(n)
        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "labels", _frozen(labels))

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes

    @property
    def num_features(self) -> int:
        return int(self.features.shape[1])

    def induced(self, nodes) -> "Dataset":
        """
        Sub-dataset on `nodes` (relabelled in the given order).

        Split sets are intersected with `nodes` and mapped to the new ids.
        """
        nodes = np.asarray(nodes, dtype=np.int64)
        position = np.full(self.num_nodes, -1, dtype=np.int64)
        position[nodes] = np.arange(nodes.shape[0])

        def remap(ids):
            mapped = position[ids]
            return mapped[mapped >= 0]

        return Dataset(
            graph=self.graph.induced(nodes),
            features=self.features[nodes],
            labels=self.labels[nodes],
            split=Split(remap(self.split.train), remap(self.split.val), remap(self.split.test)),
            num_classes=self.num_classes,
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.graph == other.graph
            and self.num_classes == other.num_classes
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and self.split == other.split
        )

    def __repr__(self) -> str:
        return (f"Dataset(nodes={self.num_nodes}, edges={self.graph.num_edges}, "
                f"features={self.num_features}, classes={self.num_classes}, "
                f"train={self.split.train.size}, val={self.split.val.size}, test={self.split.test.size})")
