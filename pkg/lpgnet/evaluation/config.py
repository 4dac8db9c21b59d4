from dataclasses import dataclass, field, fields
import math
from pathlib import Path

from lpgnet.attacks import DEFAULT_DELTA, AttackKind, DegreeBand, PairMode, SimilarityMetric
from lpgnet.graph import BIPARTITE_DEFAULTS, generate_bipartite, generate_erdos_renyi, load_dataset_dir
from lpgnet.models import DEFAULT_EPS_R
from lpgnet.nn import TrainConfig
from lpgnet.types import Dataset, ModelKind, RecordMixin, Setting, parse_enum
from lpgnet.utils.config import load_config, parse_epsilon
from lpgnet.utils.errors import ConfigError
from .metrics import UtilityMetric

__all__ = ["DatasetSpec", "ModelSpec", "PairsConfig", "ExperimentConfig", "load_experiment_config",
           "STANDARD_GRID", "DATASET_KINDS"]

# learning rate, hidden size, hidden layers, dropout
STANDARD_GRID = {
    "lr": [0.005, 0.001, 0.01, 0.05],
    "hid_s": [16, 64, 256],
    "hid_n": [2, 3],
    "dropout": [0.1, 0.3, 0.5],
}

DATASET_KINDS = ("bipartite", "erdos_renyi", "files")


def _check_keys(cls, data: dict, what: str):
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown {what} option(s): {', '.join(unknown)}")


@dataclass(frozen=True)
class DatasetSpec(RecordMixin):
    """Where an experiment's dataset comes from: a generator with params, or a directory of files."""

    kind: str = "bipartite"
    params: dict = field(default_factory=dict)
    path: str | None = None
    seed: int = 0
    num_classes: int | None = None

    def __post_init__(self):
        if self.kind not in DATASET_KINDS:
            raise ConfigError(f"unknown dataset kind {self.kind!r}; expected one of: {', '.join(DATASET_KINDS)}")
        if self.kind == "files" and not self.path:
            raise ConfigError("a 'files' dataset needs a path")

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetSpec":
        _check_keys(cls, data, "dataset")
        values = dict(data)
        if "kind" in values:
            values["kind"] = str(values["kind"]).replace("-", "_")
        return cls(**values)

    def load(self, base_dir: Path | None = None) -> Dataset:
        if self.kind == "bipartite":
            return generate_bipartite(**{**BIPARTITE_DEFAULTS, **self.params}, seed=self.seed)
        if self.kind == "erdos_renyi":
            return generate_erdos_renyi(**self.params, seed=self.seed)
        path = Path(self.path)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return load_dataset_dir(path, num_classes=self.num_classes)


@dataclass(frozen=True)
class ModelSpec(RecordMixin):
    """
    One model line of an experiment. `overrides` patch the experiment's
    TrainConfig for this model only (e.g. hid_n=0 for a one-layer GCN).
    """

    kind: ModelKind
    nl: int = 1
    name: str | None = None
    overrides: dict = field(default_factory=dict)
    eps_r: float = DEFAULT_EPS_R

    def __post_init__(self):
        if self.kind is ModelKind.Lpgnet and self.nl < 1:
            raise ConfigError(f"lpgnet needs nl >= 1, got {self.nl}")
        unknown = sorted(set(self.overrides) - {f.name for f in fields(TrainConfig)})
        if unknown:
            raise ConfigError(f"unknown override(s) for {self.label}: {', '.join(unknown)}")

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        return f"lpgnet-{self.nl}" if self.kind is ModelKind.Lpgnet else self.kind.value

    @classmethod
    def from_dict(cls, data) -> "ModelSpec":
        if isinstance(data, str):
            data = {"kind": data}
        _check_keys(cls, data, "model")
        values = dict(data)
        try:
            values["kind"] = parse_enum(ModelKind, values["kind"])
        except (KeyError, ValueError) as e:
            raise ConfigError(f"invalid model entry {data!r}: {e}") from e
        if "nl" in values:
            values["nl"] = int(values["nl"])
        if "eps_r" in values:
            values["eps_r"] = float(values["eps_r"])
        return cls(**values)

    def train_config(self, base: TrainConfig) -> TrainConfig:
        return base.updated(**self.overrides) if self.overrides else base


@dataclass(frozen=True)
class PairsConfig(RecordMixin):
    k: int = 500
    mode: PairMode | None = None
    degree_band: DegreeBand = DegreeBand.All
    band_size: int = 500
    delta: float = DEFAULT_DELTA
    lpa_metrics: tuple[SimilarityMetric, ...] = (SimilarityMetric.Cosine,)
    # per-pair score files under <output_dir>/pairs
    dump_scores: bool = False

    def __post_init__(self):
        if self.k < 1 or self.band_size < 1:
            raise ConfigError(f"pair counts must be positive, got k={self.k}, band_size={self.band_size}")
        if not self.delta > 0:
            raise ConfigError(f"delta must be positive, got {self.delta}")
        if not self.lpa_metrics:
            raise ConfigError("at least one LPA similarity metric is required")
        if not isinstance(self.dump_scores, bool):
            raise ConfigError(f"dump_scores must be true or false, got {self.dump_scores!r}")

    def mode_for(self, setting: Setting) -> PairMode:
        if self.mode is not None:
            return self.mode
        return PairMode.InductiveSubgraph if setting.inductive else PairMode.TransductiveSampled

    @classmethod
    def from_dict(cls, data: dict) -> "PairsConfig":
        _check_keys(cls, data, "pairs")
        values = dict(data)
        try:
            if values.get("mode") is not None:
                values["mode"] = parse_enum(PairMode, values["mode"])
            if "degree_band" in values:
                values["degree_band"] = parse_enum(DegreeBand, values["degree_band"])
            if "lpa_metrics" in values:
                values["lpa_metrics"] = tuple(parse_enum(SimilarityMetric, m) for m in values["lpa_metrics"])
            for name in ("k", "band_size"):
                if name in values:
                    values[name] = int(values[name])
            if "delta" in values:
                values["delta"] = float(values["delta"])
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"invalid pairs option: {e}") from e
        return cls(**values)


@dataclass(frozen=True)
class ExperimentConfig(RecordMixin):
    name: str
    dataset: DatasetSpec
    models: tuple[ModelSpec, ...]
    setting: Setting = Setting.Transductive
    epsilons: tuple[float, ...] = (math.inf,)
    train: TrainConfig = field(default_factory=TrainConfig)
    grid: dict | None = None
    attacks: tuple[AttackKind, ...] = (AttackKind.Lpa, AttackKind.LinkTeller)
    train_seeds: int = 30
    attack_seeds: int = 5
    seed: int = 0
    pairs: PairsConfig = field(default_factory=PairsConfig)
    utility_metric: UtilityMetric = UtilityMetric.MicroF1
    output_dir: str = "results"

    def __post_init__(self):
        if not self.models:
            raise ConfigError("an experiment needs at least one model")
        if not self.epsilons:
            raise ConfigError("an experiment needs at least one epsilon")
        for eps in self.epsilons:
            if not eps > 0:
                raise ConfigError(f"epsilon entries must be positive or inf, got {eps}")
        if self.train_seeds < 1 or self.attack_seeds < 1:
            raise ConfigError(f"seed counts must be at least 1, got {self.train_seeds} and {self.attack_seeds}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.grid is not None:
            if not self.grid or any(not values for values in self.grid.values()):
                raise ConfigError("a grid needs at least one value per key")
            unknown = sorted(set(self.grid) - {f.name for f in fields(TrainConfig)})
            if unknown:
                raise ConfigError(f"unknown grid key(s): {', '.join(unknown)}")
        labels = [m.label for m in self.models]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"model labels must be unique, got {labels}")

    def train_seed_values(self) -> list[int]:
        return [self.seed + i for i in range(self.train_seeds)]

    def attack_seed_values(self) -> list[int]:
        return [self.seed + j for j in range(self.attack_seeds)]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        _check_keys(cls, data, "experiment")
        values = dict(data)
        if "name" not in values or "dataset" not in values or "models" not in values:
            raise ConfigError("an experiment config needs 'name', 'dataset' and 'models'")
        try:
            values["dataset"] = DatasetSpec.from_dict(values["dataset"])
            values["models"] = tuple(ModelSpec.from_dict(m) for m in values["models"])
            if "setting" in values:
                values["setting"] = parse_enum(Setting, values["setting"])
            if "epsilons" in values:
                values["epsilons"] = tuple(parse_epsilon(e) for e in values["epsilons"])
            if "train" in values:
                values["train"] = TrainConfig.from_dict(values["train"])
            if "attacks" in values:
                values["attacks"] = tuple(parse_enum(AttackKind, a) for a in values["attacks"])
            if "pairs" in values:
                values["pairs"] = PairsConfig.from_dict(values["pairs"])
            if "utility_metric" in values:
                values["utility_metric"] = parse_enum(UtilityMetric, values["utility_metric"])
            for name in ("train_seeds", "attack_seeds", "seed"):
                if name in values:
                    values[name] = int(values[name])
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid experiment config: {e}") from e
        return cls(**values)

    def with_overrides(self, **changes) -> "ExperimentConfig":
        record = self.to_record()
        record.update(changes)
        return ExperimentConfig.from_dict(record)


def load_experiment_config(path) -> ExperimentConfig:
    return ExperimentConfig.from_dict(load_config(path))
