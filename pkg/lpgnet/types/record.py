from dataclasses import fields, is_dataclass
from enum import Enum
import math

import numpy as np


def to_plain(value):
    """Converts a field value to JSON-compatible data."""
    if hasattr(value, "to_record"):
        return value.to_record()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    return value


class RecordMixin:
    """Dataclass mixin with a JSON-friendly dictionary form."""

    def to_record(self) -> dict:
        if not is_dataclass(self):
            raise TypeError(f"{type(self).__name__} is not a dataclass")
        return {f.name: to_plain(getattr(self, f.name)) for f in fields(self) if f.repr}

    def __str__(self) -> str:
        items = [f"{key}={value}" for key, value in self.to_record().items()]
        return f"{self.__class__.__name__}({', '.join(items)})"
