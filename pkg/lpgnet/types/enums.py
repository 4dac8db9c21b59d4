from enum import Enum


class Setting(Enum):
    Transductive = "transductive"
    InductiveDifferent = "inductive_different"
    InductiveEvolving = "inductive_evolving"

    @property
    def inductive(self) -> bool:
        return self is not Setting.Transductive


class Phase(Enum):
    Train = "train"
    Validation = "validation"
    Inference = "inference"


class ModelKind(Enum):
    Mlp = "mlp"
    Gcn = "gcn"
    DpGcn = "dpgcn"
    Lpgnet = "lpgnet"

    @property
    def private(self) -> bool:
        return self in (ModelKind.DpGcn, ModelKind.Lpgnet)


class AdjacencyMode(Enum):
    FirstOrderGcn = "first_order_gcn"
    AugNormAdj = "aug_norm_adj"


class SelectionMode(Enum):
    ValF1 = "val_f1"
    ValLoss = "val_loss"
    TrainLoss = "train_loss"


def parse_enum(enum_cls, value):
    """Accepts enum members, their values, and dash-separated spellings."""
    if isinstance(value, enum_cls):
        return value
    text = str(value).strip().lower().replace("-", "_")
    try:
        return enum_cls(text)
    except ValueError as e:
        choices = ", ".join(m.value for m in enum_cls)
        raise ValueError(f"unknown {enum_cls.__name__} {value!r}; expected one of: {choices}") from e
