from dataclasses import dataclass

import numpy as np

from lpgnet.types import Dataset, Graph, Phase, Setting

__all__ = ["PhaseView", "PhaseViews", "phase_views"]


@dataclass(frozen=True, eq=False)
class PhaseView:
    """The graph a phase may query, its node features/labels and the labelled rows it uses."""

    phase: Phase
    graph: Graph
    features: np.ndarray
    labels: np.ndarray
    rows: np.ndarray

    @property
    def num_nodes(self) -> int:
        return self.graph.num_nodes


@dataclass(frozen=True, eq=False)
class PhaseViews:
    setting: Setting
    train: PhaseView
    validation: PhaseView
    inference: PhaseView

    @property
    def validation_shares_training_graph(self) -> bool:
        return self.validation.graph is self.train.graph


def _view(phase: Phase, dataset: Dataset, rows) -> PhaseView:
    return PhaseView(phase, dataset.graph, dataset.features, dataset.labels, np.asarray(rows, dtype=np.int64))


def phase_views(dataset: Dataset, setting: Setting) -> PhaseViews:
    """
    Splits a dataset into the graphs each phase is allowed to see.

    transductive: every phase works on the full graph.
    inductive_different: training graph = induced(train ∪ val), validation
        rows live in it; inference graph = induced(test).
    inductive_evolving: training graph = induced(train), validation graph =
        induced(train ∪ val), inference graph = the full graph.
    """
    split = dataset.split
    if setting is Setting.Transductive:
        train = _view(Phase.Train, dataset, split.train)
        validation = PhaseView(Phase.Validation, train.graph, train.features, train.labels, split.val)
        inference = PhaseView(Phase.Inference, train.graph, train.features, train.labels, split.test)
        return PhaseViews(setting, train, validation, inference)

    if setting is Setting.InductiveDifferent:
        seen = np.concatenate([split.train, split.val])
        seen_data = dataset.induced(seen)
        train = _view(Phase.Train, seen_data, seen_data.split.train)
        validation = PhaseView(Phase.Validation, train.graph, train.features, train.labels, seen_data.split.val)
        test_data = dataset.induced(split.test)
        inference = _view(Phase.Inference, test_data, np.arange(test_data.num_nodes))
        return PhaseViews(setting, train, validation, inference)

    train_data = dataset.induced(split.train)
    train = _view(Phase.Train, train_data, np.arange(train_data.num_nodes))
    seen = np.concatenate([split.train, split.val])
    val_data = dataset.induced(seen)
    validation = _view(Phase.Validation, val_data, np.arange(split.train.size, seen.size))
    inference = _view(Phase.Inference, dataset, split.test)
    return PhaseViews(setting, train, validation, inference)
