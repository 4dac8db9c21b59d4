from dataclasses import dataclass, field
import json
import math
from pathlib import Path

from lpgnet.types import Phase, RecordMixin, Setting
from lpgnet.utils.errors import LpgnetError
from lpgnet.utils.logger_config import make_logger

__all__ = ["BudgetError", "OverspendError", "DoubleChargeError", "AllocationError",
           "BudgetPlan", "BudgetLedger", "LedgerEntry", "plan_budget", "charge", "INFINITY"]

INFINITY = math.inf
# relative slack when comparing sums of ε/nl shares against ε
_TOLERANCE = 1e-9

logger = make_logger("dp.budget")


class BudgetError(LpgnetError):
    pass


class OverspendError(BudgetError):
    pass


class DoubleChargeError(BudgetError):
    pass


class AllocationError(BudgetError):
    pass


@dataclass(frozen=True)
class BudgetPlan(RecordMixin):
    """
    Per-phase, per-layer ε allocations.

    An allocation of 0 means the phase reuses cached degree vectors and makes
    no fresh query. With total_epsilon = inf every allocation is inf and no
    noise is added.
    """

    setting: Setting
    total_epsilon: float
    nl: int
    train: float
    validation: float
    inference: float

    @property
    def private(self) -> bool:
        return math.isfinite(self.total_epsilon)

    def allocation(self, phase: Phase) -> float:
        return {Phase.Train: self.train, Phase.Validation: self.validation, Phase.Inference: self.inference}[phase]

    def pool(self, phase: Phase) -> str:
        """
        Ledger pool a phase draws from.

        inductive_different protects the training graph and the inference
        graph separately, each at the full ε; other settings share one pool.
        """
        if self.setting is Setting.InductiveDifferent:
            return "inference_graph" if phase is Phase.Inference else "training_graph"
        return "graph"

    def pools(self) -> list[str]:
        return sorted({self.pool(phase) for phase in Phase})

    @classmethod
    def from_record(cls, record: dict) -> "BudgetPlan":
        def eps(value):
            return math.inf if value == "inf" else float(value)

        return cls(
            setting=Setting(record["setting"]),
            total_epsilon=eps(record["total_epsilon"]),
            nl=int(record["nl"]),
            train=eps(record["train"]),
            validation=eps(record["validation"]),
            inference=eps(record["inference"]),
        )


def plan_budget(setting: Setting, total_epsilon: float, nl: int) -> BudgetPlan:
    if nl < 1:
        raise BudgetError(f"nl must be at least 1, got {nl}")
    if math.isnan(total_epsilon) or total_epsilon <= 0:
        raise BudgetError(f"total epsilon must be positive or inf, got {total_epsilon}")
    if math.isinf(total_epsilon):
        return BudgetPlan(setting, INFINITY, nl, INFINITY, INFINITY, INFINITY)
    share = total_epsilon / nl
    if setting is Setting.Transductive:
        return BudgetPlan(setting, total_epsilon, nl, share, 0.0, 0.0)
    if setting is Setting.InductiveDifferent:
        return BudgetPlan(setting, total_epsilon, nl, share, 0.0, share)
    third = total_epsilon / (3 * nl)
    return BudgetPlan(setting, total_epsilon, nl, third, third, third)


@dataclass(frozen=True)
class LedgerEntry(RecordMixin):
    phase: Phase
    layer: int
    epsilon: float
    pool: str
    cumulative: float


@dataclass
class BudgetLedger:
    """Sequential-composition ledger; each (phase, layer) may be charged once."""

    plan: BudgetPlan
    entries: list[LedgerEntry] = field(default_factory=list)

    def spent(self, pool: str) -> float:
        return math.fsum(e.epsilon for e in self.entries if e.pool == pool)

    def totals(self) -> dict[str, float]:
        return {pool: self.spent(pool) for pool in self.plan.pools()}

    def charged(self, phase: Phase, layer: int) -> bool:
        return any(e.phase is phase and e.layer == layer for e in self.entries)

    def charge(self, phase: Phase, layer: int, eps: float) -> "BudgetLedger":
        if not self.plan.private:
            # ε = inf: queries are noise-free and nothing is accounted
            return self
        if self.charged(phase, layer):
            raise DoubleChargeError(f"({phase.value}, layer {layer}) was already charged")
        pool = self.plan.pool(phase)
        total = math.fsum([self.spent(pool), eps])
        limit = self.plan.total_epsilon
        if total > limit * (1 + _TOLERANCE):
            raise OverspendError(
                f"charging {eps} for ({phase.value}, layer {layer}) brings pool '{pool}' to {total} > ε={limit}"
            )
        allocated = self.plan.allocation(phase)
        if not math.isclose(eps, allocated, rel_tol=_TOLERANCE) or allocated == 0:
            raise AllocationError(
                f"charge {eps} for ({phase.value}, layer {layer}) does not match the planned allocation {allocated}"
            )
        if not 0 <= layer < self.plan.nl:
            raise AllocationError(f"layer {layer} outside [0, {self.plan.nl})")
        entry = LedgerEntry(phase=phase, layer=layer, epsilon=eps, pool=pool, cumulative=total)
        self.entries.append(entry)
        logger.info(f"charged ε={eps:.6g} to pool '{pool}' for {phase.value} layer {layer} (pool total {total:.6g})")
        return self

    def to_record(self) -> dict:
        return {
            "plan": self.plan.to_record(),
            "entries": [e.to_record() for e in self.entries],
            "totals": self.totals(),
        }

    def write_json(self, path) -> None:
        with open(Path(path), "w", encoding="utf-8") as f:
            json.dump(self.to_record(), f, indent=2)

    @classmethod
    def from_record(cls, record: dict) -> "BudgetLedger":
        ledger = cls(BudgetPlan.from_record(record["plan"]))
        for item in record["entries"]:
            ledger.entries.append(LedgerEntry(
                phase=Phase(item["phase"]), layer=int(item["layer"]), epsilon=float(item["epsilon"]),
                pool=item["pool"], cumulative=float(item["cumulative"]),
            ))
        return ledger


def charge(ledger: BudgetLedger, phase: Phase, layer: int, eps: float) -> BudgetLedger:
    return ledger.charge(phase, layer, eps)
