from dataclasses import dataclass, field
from enum import Enum
import json
from pathlib import Path

import numpy as np
import pandas as pd
from scipy.stats import rankdata

from .pairs import AttackError, EvalPairs

__all__ = ["AttackKind", "AttackResult", "auc", "PAIR_COLUMNS"]

PAIR_COLUMNS = ["u", "v", "is_edge", "score"]


class AttackKind(Enum):
    Lpa = "lpa"
    LinkTeller = "linkteller"


def auc(positive_scores, negative_scores) -> float:
    """
    P(positive > negative) + 0.5 * P(tie), from the Mann-Whitney rank sum.
    """
    pos = np.asarray(positive_scores, dtype=np.float64).reshape(-1)
    neg = np.asarray(negative_scores, dtype=np.float64).reshape(-1)
    if pos.size == 0 or neg.size == 0:
        raise AttackError(f"auc needs positive and negative scores, got {pos.size} and {neg.size}")
    ranks = rankdata(np.concatenate([pos, neg]), method="average")
    u_statistic = ranks[:pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u_statistic / (pos.size * neg.size))


@dataclass(frozen=True, eq=False)
class AttackResult:
    """Scores aligned with pairs.pairs() (positives first) and their AUC."""

    attack: AttackKind
    pairs: EvalPairs
    scores: np.ndarray
    auc: float
    seed: int
    details: dict = field(default_factory=dict)

    @classmethod
    def from_scores(cls, attack: AttackKind, pairs: EvalPairs, scores: np.ndarray, seed: int,
                    **details) -> "AttackResult":
        scores = np.asarray(scores, dtype=np.float64)
        if scores.shape != (pairs.num_pairs,):
            raise AttackError(f"expected {pairs.num_pairs} scores, got shape {scores.shape}")
        value = auc(scores[:pairs.num_positives], scores[pairs.num_positives:])
        return cls(attack=attack, pairs=pairs, scores=scores, auc=value, seed=seed, details=details)

    def to_frame(self) -> pd.DataFrame:
        table = self.pairs.pairs()
        return pd.DataFrame({
            "u": table[:, 0],
            "v": table[:, 1],
            "is_edge": self.pairs.labels().astype(int),
            "score": self.scores,
        }, columns=PAIR_COLUMNS)

    def summary(self, **context) -> dict:
        return {
            "attack": self.attack.value,
            **context,
            "seed": self.seed,
            "auc": self.auc,
            "mode": self.pairs.mode.value,
            "degree_band": self.pairs.degree_band.value,
            "positives": self.pairs.num_positives,
            "negatives": self.pairs.num_negatives,
            **self.details,
        }

    def write(self, csv_path, json_path=None, **context) -> None:
        self.to_frame().to_csv(Path(csv_path), index=False, float_format="%.17g")
        if json_path is not None:
            with open(Path(json_path), "w", encoding="utf-8") as f:
                json.dump(self.summary(**context), f, indent=2)

    def file_stem(self, similarity: str = "", prefix: str = "") -> str:
        parts = [prefix, self.attack.value, similarity, f"seed{self.seed}"]
        return "-".join(part for part in parts if part)

    def write_to(self, directory, stem: str, **context) -> Path:
        """<stem>.csv with one row per pair and <stem>.json with the summary."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        csv_path = directory / f"{stem}.csv"
        self.write(csv_path, directory / f"{stem}.json", **context)
        return csv_path
