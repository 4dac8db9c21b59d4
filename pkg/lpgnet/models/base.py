import json
import math
from pathlib import Path
from typing import Callable

import numpy as np

from lpgnet.dp import BudgetLedger, plan_budget
from lpgnet.graph import PhaseView, PhaseViews, phase_views, read_edge_list, write_edge_list
from lpgnet.nn import (GcnModel, MlpModel, NormalizedAdjacency, TrainConfig, TrainingData, fit_network, gcn_forward,
                       load_checkpoint, mlp_forward, normalize_adjacency, save_checkpoint, softmax, train_gcn)
from lpgnet.types import AdjacencyMode, Dataset, Graph, ModelKind, Phase, Setting, parse_enum
from lpgnet.utils.config import format_epsilon
from lpgnet.utils.logger_config import make_logger
from lpgnet.utils.seeding import derive_rng
from .dpgcn import DEFAULT_EPS_R, PerturbedAdjacency, dpgcn_perturb
from .lpgnet import CacheMissError, ModelError, TrainedLpgnet, lpgnet_infer, train_lpgnet

__all__ = ["TrainedModel", "MlpClassifier", "GcnClassifier", "LpgnetClassifier", "Oracle",
           "train_model", "load_model", "MANIFEST_NAME"]

logger = make_logger("models.base")

MANIFEST_NAME = "manifest.json"

Oracle = Callable[[np.ndarray], np.ndarray]


class TrainedModel:
    """Uniform handle over mlp / gcn / dpgcn / lpgnet."""

    kind: ModelKind

    def predict_logits(self, view: PhaseView, features: np.ndarray | None = None) -> np.ndarray:
        raise NotImplementedError("base class call. should be overridden")

    def oracle(self, view: PhaseView) -> Oracle:
        """Black box: a full feature matrix in, N×C posteriors on view's graph out."""
        def query(features: np.ndarray) -> np.ndarray:
            return softmax(self.predict_logits(view, features))
        return query

    @property
    def ledger(self) -> BudgetLedger | None:
        return None

    def manifest(self) -> dict:
        raise NotImplementedError("base class call. should be overridden")

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self._save_payload(directory)
        with open(directory / MANIFEST_NAME, "w", encoding="utf-8") as f:
            json.dump(self.manifest(), f, indent=2)
        logger.info(f"saved {self.kind.value} model to {directory}")
        return directory

    def _save_payload(self, directory: Path):
        raise NotImplementedError("base class call. should be overridden")


class MlpClassifier(TrainedModel):
    kind = ModelKind.Mlp

    def __init__(self, network: MlpModel):
        self.network = network

    def predict_logits(self, view: PhaseView, features: np.ndarray | None = None) -> np.ndarray:
        return mlp_forward(self.network, view.features if features is None else features)

    def manifest(self) -> dict:
        return {"kind": self.kind.value, "input_dim": self.network.input_dim, "num_classes": self.network.num_classes}

    def _save_payload(self, directory: Path):
        save_checkpoint(self.network, directory / "network.json")


class GcnClassifier(TrainedModel):
    """
    GCN over the true graph (gcn) or over noisy releases of it (dpgcn).

    A dpgcn model perturbs each graph it touches once, with that phase's
    allocation, and keeps the release keyed by the graph fingerprint.
    """

    def __init__(self, network: GcnModel | None, kind: ModelKind, mode: AdjacencyMode, setting: Setting,
                 ledger: BudgetLedger | None = None, eps_r: float = DEFAULT_EPS_R, seed: int = 0):
        self.network = network
        self.kind = kind
        self.mode = mode
        self.setting = setting
        self._ledger = ledger
        self.eps_r = eps_r
        self.seed = seed
        self.releases: dict[str, PerturbedAdjacency] = {}
        self._adjacency: dict[str, NormalizedAdjacency] = {}

    @property
    def ledger(self) -> BudgetLedger | None:
        return self._ledger

    def release(self, graph: Graph, phase: Phase) -> Graph:
        if self.kind is not ModelKind.DpGcn:
            return graph
        key = graph.fingerprint()
        if key not in self.releases:
            if self.setting is Setting.Transductive and phase is not Phase.Train:
                raise CacheMissError(f"no perturbed release of graph {key}; transductive dpgcn must reuse the "
                                     "training release")
            eps = self._ledger.plan.allocation(phase)
            self._ledger.charge(phase, 0, eps)
            self.releases[key] = dpgcn_perturb(
                graph, eps, self.eps_r,
                rng=derive_rng(self.seed, f"adjacency_noise/{phase.value}"),
                count_rng=derive_rng(self.seed, f"edge_count/{phase.value}"),
            )
        return self.releases[key].graph

    def adjacency(self, graph: Graph, phase: Phase) -> NormalizedAdjacency:
        key = graph.fingerprint()
        if key not in self._adjacency:
            self._adjacency[key] = normalize_adjacency(self.release(graph, phase), self.mode)
        return self._adjacency[key]

    def predict_logits(self, view: PhaseView, features: np.ndarray | None = None) -> np.ndarray:
        adjacency = self.adjacency(view.graph, Phase.Inference)
        return gcn_forward(self.network, adjacency, view.features if features is None else features)

    def manifest(self) -> dict:
        return {
            "kind": self.kind.value,
            "adjacency": self.mode.value,
            "setting": self.setting.value,
            "eps_r": self.eps_r,
            "seed": self.seed,
            "ledger": self._ledger.to_record() if self._ledger else None,
            "releases": {key: r.to_record() for key, r in self.releases.items()},
        }

    def _save_payload(self, directory: Path):
        save_checkpoint(self.network, directory / "network.json")
        if self.releases:
            (directory / "releases").mkdir(exist_ok=True)
        for key, release in self.releases.items():
            write_edge_list(release.graph, directory / "releases" / f"{key}.txt")


class LpgnetClassifier(TrainedModel):
    kind = ModelKind.Lpgnet

    def __init__(self, chain: TrainedLpgnet):
        self.chain = chain

    @property
    def ledger(self) -> BudgetLedger:
        return self.chain.ledger

    def predict_logits(self, view: PhaseView, features: np.ndarray | None = None) -> np.ndarray:
        return lpgnet_infer(self.chain, view, features)

    def manifest(self) -> dict:
        return {
            "kind": self.kind.value,
            "nl": self.chain.nl,
            "setting": self.chain.setting.value,
            "num_classes": self.chain.num_classes,
            "input_dims": self.chain.input_dims(),
            "seed": self.chain.seed,
            "ledger": self.chain.ledger.to_record(),
            "cache": {key: len(vectors) for key, vectors in self.chain.cache.items()},
        }

    def _save_payload(self, directory: Path):
        for i, mlp in enumerate(self.chain.mlps):
            save_checkpoint(mlp, directory / f"mlp_{i}.json")
        for key, vectors in self.chain.cache.items():
            cache_dir = directory / "degree_vectors" / key
            cache_dir.mkdir(parents=True, exist_ok=True)
            for i, x in enumerate(vectors):
                np.save(cache_dir / f"x_{i}.npy", x)


def _gcn_data(view: PhaseView, adjacency: NormalizedAdjacency) -> TrainingData:
    return TrainingData(view.features, view.labels, view.rows, adjacency)


def _train_gcn_classifier(views: PhaseViews, kind: ModelKind, ledger: BudgetLedger | None, config: TrainConfig,
                          num_classes: int, eps_r: float) -> GcnClassifier:
    holder = GcnClassifier(None, kind, config.adjacency, views.setting, ledger, eps_r, config.seed)
    train_adj = holder.adjacency(views.train.graph, Phase.Train)
    val_adj = holder.adjacency(views.validation.graph, Phase.Validation)
    holder.network = train_gcn(_gcn_data(views.train, train_adj), _gcn_data(views.validation, val_adj), config,
                               num_classes, keys=(0,))
    return holder


def train_model(kind: ModelKind | str, dataset: Dataset, setting: Setting | str, eps: float, nl: int = 1,
                config: TrainConfig | None = None, eps_r: float = DEFAULT_EPS_R) -> TrainedModel:
    """
    Trains one model of `kind` under `setting`.

    mlp and gcn ignore eps. dpgcn spends its plan (nl = 1) on one perturbed
    release per graph; lpgnet spends eps/nl per degree-vector query.
    """
    kind = parse_enum(ModelKind, kind)
    setting = parse_enum(Setting, setting)
    config = config or TrainConfig()
    views = phase_views(dataset, setting)
    num_classes = dataset.num_classes
    logger.info(f"training {kind.value} ({setting.value}, eps={format_epsilon(eps)}, nl={nl}, seed={config.seed})")

    if kind is ModelKind.Mlp:
        network = fit_network(MlpModel, TrainingData(views.train.features, views.train.labels, views.train.rows),
                              TrainingData(views.validation.features, views.validation.labels, views.validation.rows),
                              config, num_classes, keys=(0,))
        return MlpClassifier(network)
    if kind is ModelKind.Gcn:
        return _train_gcn_classifier(views, kind, None, config, num_classes, eps_r)
    if kind is ModelKind.DpGcn:
        ledger = BudgetLedger(plan_budget(setting, eps, 1))
        return _train_gcn_classifier(views, kind, ledger, config, num_classes, eps_r)
    ledger = BudgetLedger(plan_budget(setting, eps, nl))
    return LpgnetClassifier(train_lpgnet(views, eps, nl, config, num_classes, ledger))


def _read_manifest(directory: Path) -> dict:
    path = directory / MANIFEST_NAME
    if not path.exists():
        raise ModelError(f"not a model directory (missing {path})")
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_model(directory) -> TrainedModel:
    directory = Path(directory)
    manifest = _read_manifest(directory)
    kind = parse_enum(ModelKind, manifest["kind"])

    if kind is ModelKind.Mlp:
        return MlpClassifier(load_checkpoint(directory / "network.json"))

    if kind in (ModelKind.Gcn, ModelKind.DpGcn):
        ledger = BudgetLedger.from_record(manifest["ledger"]) if manifest.get("ledger") else None
        model = GcnClassifier(load_checkpoint(directory / "network.json"), kind,
                              parse_enum(AdjacencyMode, manifest["adjacency"]), Setting(manifest["setting"]),
                              ledger, float(manifest["eps_r"]), int(manifest["seed"]))
        for key, meta in manifest.get("releases", {}).items():
            graph = read_edge_list(directory / "releases" / f"{key}.txt", int(meta["num_nodes"]))
            eps = math.inf if meta["epsilon"] == "inf" else float(meta["epsilon"])
            model.releases[key] = PerturbedAdjacency(graph, int(meta["num_selected"]), float(meta["noisy_fraction"]),
                                                     eps, float(meta["eps_r"]))
        return model

    nl = int(manifest["nl"])
    mlps = [load_checkpoint(directory / f"mlp_{i}.json") for i in range(nl + 1)]
    cache = {
        key: [np.load(directory / "degree_vectors" / key / f"x_{i}.npy") for i in range(count)]
        for key, count in manifest.get("cache", {}).items()
    }
    chain = TrainedLpgnet(mlps=mlps, setting=Setting(manifest["setting"]), num_classes=int(manifest["num_classes"]),
                          ledger=BudgetLedger.from_record(manifest["ledger"]), seed=int(manifest["seed"]), cache=cache)
    return LpgnetClassifier(chain)
