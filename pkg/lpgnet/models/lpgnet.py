from dataclasses import dataclass, field

import numpy as np

from lpgnet.dp import BudgetLedger, BudgetPlan, plan_budget
from lpgnet.graph import PhaseView, PhaseViews
from lpgnet.nn import MlpModel, TrainConfig, TrainingData, fit_network, mlp_forward
from lpgnet.types import Graph, Phase, Setting
from lpgnet.utils.errors import LpgnetError, ShapeError
from lpgnet.utils.logger_config import make_logger
from lpgnet.utils.seeding import derive_rng
from .degree_vectors import find_degree_vec, hard_labels

__all__ = ["ModelError", "CacheMissError", "TrainedLpgnet", "train_lpgnet", "lpgnet_infer", "stack_features"]

logger = make_logger("models.lpgnet")


class ModelError(LpgnetError):
    pass


class CacheMissError(ModelError):
    pass


def stack_features(previous: np.ndarray | None, logits: np.ndarray, degree_vectors: np.ndarray) -> np.ndarray:
    """F_1 = L_0 ⌢ X_0; F_{i+1} = F_i ⌢ L_i ⌢ X_i."""
    blocks = [logits, degree_vectors] if previous is None else [previous, logits, degree_vectors]
    return np.concatenate(blocks, axis=1)


def degree_vector_rng(seed: int, phase: Phase, layer: int) -> np.random.Generator:
    return derive_rng(seed, f"degree_vectors/{phase.value}", layer)


@dataclass(eq=False)
class TrainedLpgnet:
    """
    MLP chain M[0..nl] plus the degree vectors it has released.

    `cache` maps a graph fingerprint to the per-layer degree vectors computed
    on that graph; a hit reuses them without spending budget.
    """

    mlps: list[MlpModel]
    setting: Setting
    num_classes: int
    ledger: BudgetLedger
    seed: int
    cache: dict[str, list[np.ndarray]] = field(default_factory=dict)

    @property
    def nl(self) -> int:
        return len(self.mlps) - 1

    @property
    def plan(self) -> BudgetPlan:
        return self.ledger.plan

    def input_dims(self) -> list[int]:
        return [m.input_dim for m in self.mlps]


def _chain_degree_vectors(mlps: list[MlpModel], graph: Graph, features: np.ndarray, eps: float, seed: int,
                          num_classes: int, ledger: BudgetLedger, phase: Phase) -> list[np.ndarray]:
    vectors: list[np.ndarray] = []
    stacked = None
    for i in range(len(mlps) - 1):
        logits = mlp_forward(mlps[i], features if stacked is None else stacked)
        x = find_degree_vec(graph, hard_labels(logits), eps, degree_vector_rng(seed, phase, i),
                            num_classes=num_classes, ledger=ledger, phase=phase, layer=i)
        vectors.append(x.values)
        stacked = stack_features(stacked, logits, x.values)
    return vectors


def _forward_with_vectors(mlps: list[MlpModel], features: np.ndarray, vectors: list[np.ndarray]) -> np.ndarray:
    stacked = None
    for i, x in enumerate(vectors):
        logits = mlp_forward(mlps[i], features if stacked is None else stacked)
        stacked = stack_features(stacked, logits, x)
    return mlp_forward(mlps[-1], features if stacked is None else stacked)


def train_lpgnet(views: PhaseViews, eps: float, nl: int, config: TrainConfig, num_classes: int,
                 ledger: BudgetLedger | None = None) -> TrainedLpgnet:
    """
    Trains M[0] on raw features, then for each layer i < nl: labels from
    M[i]'s evaluation-mode logits, degree vectors X_i on the training graph
    with the train allocation, F_{i+1} from the stacking rule, and M[i+1] on
    F_{i+1}. When validation runs on its own graph, its degree vectors are
    computed there with the validation allocation.
    """
    if nl < 1:
        raise ModelError(f"lpgnet needs nl >= 1, got {nl}")
    if ledger is None:
        ledger = BudgetLedger(plan_budget(views.setting, eps, nl))
    plan = ledger.plan
    seed = config.seed
    train, validation = views.train, views.validation
    shared = views.validation_shares_training_graph

    def fit(layer: int, train_features: np.ndarray, val_features: np.ndarray) -> MlpModel:
        return fit_network(
            MlpModel,
            TrainingData(train_features, train.labels, train.rows),
            TrainingData(val_features, validation.labels, validation.rows),
            config, num_classes, keys=(layer,),
        )

    mlps = [fit(0, train.features, validation.features)]
    train_stack = val_stack = None
    train_vectors: list[np.ndarray] = []
    val_vectors: list[np.ndarray] = []
    for i in range(nl):
        train_logits = mlp_forward(mlps[i], train.features if train_stack is None else train_stack)
        x_train = find_degree_vec(train.graph, hard_labels(train_logits), plan.train,
                                  degree_vector_rng(seed, Phase.Train, i), num_classes=num_classes,
                                  ledger=ledger, phase=Phase.Train, layer=i)
        train_vectors.append(x_train.values)
        train_stack = stack_features(train_stack, train_logits, x_train.values)

        if shared:
            val_stack = train_stack
        else:
            val_logits = mlp_forward(mlps[i], validation.features if val_stack is None else val_stack)
            x_val = find_degree_vec(validation.graph, hard_labels(val_logits), plan.validation,
                                    degree_vector_rng(seed, Phase.Validation, i), num_classes=num_classes,
                                    ledger=ledger, phase=Phase.Validation, layer=i)
            val_vectors.append(x_val.values)
            val_stack = stack_features(val_stack, val_logits, x_val.values)

        mlps.append(fit(i + 1, train_stack, val_stack))
        logger.info(f"lpgnet layer {i + 1}/{nl} trained on {train_stack.shape[1]} stacked features")

    model = TrainedLpgnet(mlps=mlps, setting=views.setting, num_classes=num_classes, ledger=ledger, seed=seed)
    model.cache[train.graph.fingerprint()] = train_vectors
    if not shared:
        model.cache[validation.graph.fingerprint()] = val_vectors
    return model


def lpgnet_infer(model: TrainedLpgnet, view: PhaseView, features: np.ndarray | None = None) -> np.ndarray:
    """
    Logits of M[nl] on `view`'s graph; only the last MLP's output is released.

    Cached degree vectors for the graph are reused as-is, so perturbing a
    node's features changes only its own output row. Without a cache entry,
    transductive models raise CacheMissError and inductive models compute and
    store vectors with the inference allocation.
    """
    features = view.features if features is None else np.asarray(features, dtype=np.float64)
    if features.shape[1] != model.mlps[0].input_dim:
        raise ShapeError("inference features do not match M[0]", expected=model.mlps[0].input_dim,
                         actual=features.shape[1])
    key = view.graph.fingerprint()
    vectors = model.cache.get(key)
    if vectors is None:
        if model.setting is Setting.Transductive:
            raise CacheMissError(f"no stored degree vectors for graph {key}; transductive inference must reuse "
                                 "the training graph")
        vectors = _chain_degree_vectors(model.mlps, view.graph, features, model.plan.inference, model.seed,
                                        model.num_classes, model.ledger, Phase.Inference)
        model.cache[key] = vectors
        logger.info(f"stored inference degree vectors for graph {key}")
    return _forward_with_vectors(model.mlps, features, vectors)
