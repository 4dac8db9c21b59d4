from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
from tqdm import tqdm

from lpgnet.attacks import AttackKind, linkteller_scores, lpa_scores, sample_eval_pairs
from lpgnet.dp import plan_budget
from lpgnet.graph import homophily_profile, phase_views
from lpgnet.models import GcnClassifier, LpgnetClassifier, TrainedModel, train_model
from lpgnet.nn import TrainConfig
from lpgnet.types import Dataset, ModelKind
from lpgnet.utils.config import format_epsilon, resolve_output_dir
from lpgnet.utils.errors import LpgnetError
from lpgnet.utils.logger_config import make_logger
from lpgnet.utils.tokens import config_hash
from .config import ExperimentConfig, ModelSpec
from .grid import grid_search
from .metrics import utility_score

__all__ = ["ExperimentError", "Cell", "CellOutcome", "ExperimentReport", "experiment_cells", "experiment_plan",
           "run_cell", "run_experiment", "experiment_hash",
           "UTILITY_COLUMNS", "ATTACK_COLUMNS", "HOMOPHILY_COLUMNS", "SUMMARY_COLUMNS"]

logger = make_logger("evaluation.experiment")

UTILITY_COLUMNS = ["model", "kind", "nl", "epsilon", "seed", "metric", "utility", "best_epoch", "noisy_fraction"]
ATTACK_COLUMNS = ["model", "kind", "nl", "epsilon", "train_seed", "attack_seed", "attack", "similarity",
                  "degree_band", "pairs", "auc"]
HOMOPHILY_COLUMNS = ["source", "model", "epsilon", "seed", "cluster", "nodes", "avg_homophily"]
SUMMARY_COLUMNS = ["model", "epsilon", "measure", "mean", "std", "count"]


class ExperimentError(LpgnetError):
    pass


@dataclass(frozen=True)
class Cell:
    model: ModelSpec
    epsilon: float
    seed: int

    def describe(self) -> str:
        return f"{self.model.label} eps={format_epsilon(self.epsilon)} seed={self.seed}"


@dataclass
class CellOutcome:
    cell: Cell
    utility: dict | None = None
    attacks: list[dict] = field(default_factory=list)
    ledger: dict | None = None
    homophily: list[dict] = field(default_factory=list)
    # (stem, result, context), filled when pairs.dump_scores is set
    pair_results: list[tuple] = field(default_factory=list)
    error: str | None = None


def experiment_cells(config: ExperimentConfig) -> list[Cell]:
    """(model, epsilon, train seed) cells; non-private models run at eps = inf only."""
    cells = []
    for spec in config.models:
        epsilons = config.epsilons if spec.kind.private else (math.inf,)
        for eps in epsilons:
            for seed in config.train_seed_values():
                cells.append(Cell(spec, eps, seed))
    return cells


def experiment_plan(config: ExperimentConfig) -> pd.DataFrame:
    """Resolved cells grouped per (model, epsilon) with each phase's per-query allocation."""
    rows = []
    for spec in config.models:
        epsilons = config.epsilons if spec.kind.private else (math.inf,)
        for eps in epsilons:
            row = {"model": spec.label, "kind": spec.kind.value, "nl": spec.nl, "epsilon": format_epsilon(eps),
                   "seeds": config.train_seeds}
            if spec.kind.private:
                plan = plan_budget(config.setting, eps, spec.nl if spec.kind is ModelKind.Lpgnet else 1)
                row.update(train=format_epsilon(plan.train), validation=format_epsilon(plan.validation),
                           inference=format_epsilon(plan.inference), pools=", ".join(plan.pools()))
            else:
                row.update(train="-", validation="-", inference="-", pools="-")
            rows.append(row)
    return pd.DataFrame(rows)


def experiment_hash(config: ExperimentConfig) -> str:
    record = config.to_record()
    record.pop("output_dir", None)
    return config_hash(record)


def _best_epoch(model: TrainedModel) -> int | None:
    if isinstance(model, LpgnetClassifier):
        history = model.chain.mlps[-1].history
    else:
        history = getattr(model, "network", None).history
    return history.best_epoch if history is not None else None


def _noisy_fraction(model: TrainedModel) -> float:
    if isinstance(model, GcnClassifier) and model.releases:
        fractions = [r.noisy_fraction for r in model.releases.values()]
        return float(np.mean(fractions))
    return math.nan


def run_cell(dataset: Dataset, config: ExperimentConfig, cell: Cell, train_config: TrainConfig) -> CellOutcome:
    """Trains one cell, scores utility on the inference rows and runs every attack seed against its oracle."""
    spec = cell.model
    outcome = CellOutcome(cell)
    base = {"model": spec.label, "kind": spec.kind.value, "nl": spec.nl, "epsilon": cell.epsilon}
    try:
        model = train_model(spec.kind, dataset, config.setting, cell.epsilon, spec.nl,
                            train_config.with_seed(cell.seed), spec.eps_r)
        views = phase_views(dataset, config.setting)
        inference = views.inference
        logits = model.predict_logits(inference)
        predictions = np.argmax(logits, axis=1)
        truth = inference.labels[inference.rows]
        utility = utility_score(config.utility_metric, predictions[inference.rows], truth, dataset.num_classes)
        outcome.utility = {**base, "seed": cell.seed, "metric": config.utility_metric.value, "utility": utility,
                           "best_epoch": _best_epoch(model), "noisy_fraction": _noisy_fraction(model)}

        profile = homophily_profile(inference.graph, predictions, dataset.num_classes)
        outcome.homophily = [{**row, "model": spec.label, "epsilon": cell.epsilon, "seed": cell.seed}
                             for row in profile.to_rows("predicted")]

        oracle = model.oracle(inference)
        posteriors = oracle(inference.features)
        mode = config.pairs.mode_for(config.setting)
        for attack_seed in config.attack_seed_values():
            pairs = sample_eval_pairs(inference.graph, mode, config.pairs.k, config.pairs.degree_band, attack_seed,
                                      nodes=inference.rows, band_size=config.pairs.band_size)
            results = []
            if AttackKind.Lpa in config.attacks:
                results += [(m.value, lpa_scores(posteriors, pairs, m, attack_seed)) for m in config.pairs.lpa_metrics]
            if AttackKind.LinkTeller in config.attacks:
                results.append(("", linkteller_scores(oracle, inference.features, pairs, config.pairs.delta,
                                                      attack_seed)))
            for similarity, result in results:
                if config.pairs.dump_scores:
                    eps = format_epsilon(cell.epsilon)
                    stem = result.file_stem(similarity, prefix=f"{spec.label}-eps{eps}-train{cell.seed}")
                    context = {"model": spec.label, "kind": spec.kind.value, "epsilon": eps,
                               "train_seed": cell.seed, "similarity": similarity}
                    outcome.pair_results.append((stem, result, context))
                outcome.attacks.append({**base, "train_seed": cell.seed, "attack_seed": attack_seed,
                                        "attack": result.attack.value, "similarity": similarity,
                                        "degree_band": pairs.degree_band.value, "pairs": pairs.num_pairs,
                                        "auc": result.auc})

        if model.ledger is not None:
            outcome.ledger = {"model": spec.label, "epsilon": format_epsilon(cell.epsilon), "seed": cell.seed,
                              "ledger": model.ledger.to_record()}
    except (LpgnetError, ValueError, FloatingPointError) as e:
        outcome.error = f"{cell.describe()}: {type(e).__name__}: {e}"
        logger.error(f"cell failed: {outcome.error}")
    return outcome


def _run_cell_job(args) -> CellOutcome:
    return run_cell(*args)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    config_hash: str
    utility: pd.DataFrame
    attacks: pd.DataFrame
    homophily: pd.DataFrame
    ledgers: list[dict]
    failures: list[str] = field(default_factory=list)
    grid: dict[str, list[dict]] = field(default_factory=dict)
    pair_results: list[tuple] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> pd.DataFrame:
        """Mean and population std over seeds per (model, epsilon, measure)."""
        frames = []
        if not self.utility.empty:
            grouped = self.utility.groupby(["model", "epsilon"], sort=False)["utility"]
            frames.append(grouped.agg(mean="mean", std=lambda s: float(np.std(s, ddof=0)), count="count")
                          .reset_index().assign(measure=self.config.utility_metric.value))
        if not self.attacks.empty:
            measure = self.attacks["attack"].where(self.attacks["similarity"] == "",
                                                   self.attacks["attack"] + "/" + self.attacks["similarity"])
            attacks = self.attacks.assign(measure=measure + " auc")
            grouped = attacks.groupby(["model", "epsilon", "measure"], sort=False)["auc"]
            frames.append(grouped.agg(mean="mean", std=lambda s: float(np.std(s, ddof=0)), count="count")
                          .reset_index())
        if not frames:
            return pd.DataFrame(columns=SUMMARY_COLUMNS)
        return pd.concat(frames, ignore_index=True)[SUMMARY_COLUMNS]

    def write(self, out_dir) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "config.json", "w", encoding="utf-8") as f:
            json.dump({"config": self.config.to_record(), "hash": self.config_hash,
                       "std": "population (ddof=0) over seeds"}, f, indent=2)
        self.utility.to_csv(out_dir / "utility.csv", index=False)
        self.attacks.to_csv(out_dir / "attacks.csv", index=False)
        self.homophily.to_csv(out_dir / "homophily.csv", index=False)
        self.summary().to_csv(out_dir / "summary.csv", index=False)
        with open(out_dir / "ledger.json", "w", encoding="utf-8") as f:
            json.dump(self.ledgers, f, indent=2)
        if self.grid:
            rows = [{"model": label, **row} for label, grid_rows in self.grid.items() for row in grid_rows]
            pd.DataFrame(rows).to_csv(out_dir / "grid.csv", index=False)
        for stem, result, context in self.pair_results:
            result.write_to(out_dir / "pairs", stem, **context)
        logger.info(f"wrote experiment report to {out_dir}")
        return out_dir


def _check_output_dir(out_dir: Path, digest: str):
    existing = out_dir / "config.json"
    if not existing.exists():
        return
    with open(existing, "r", encoding="utf-8") as f:
        previous = json.load(f).get("hash")
    if previous != digest:
        raise ExperimentError(f"{existing} belongs to a different configuration (hash {previous}); "
                              "refusing to overwrite")


def _frame(rows: list[dict], columns: list[str]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=columns)


def run_experiment(config: ExperimentConfig, jobs: int = 1, out_dir=None, write: bool = True,
                   progress: bool = True, dataset: Dataset | None = None,
                   base_dir: Path | None = None) -> ExperimentReport:
    """
    Runs every (model, epsilon, seed) cell and assembles the report in cell
    order. With a grid, each model is first tuned at eps = inf and every
    cell of that model reuses the winner.
    """
    digest = experiment_hash(config)
    target = resolve_output_dir(out_dir if out_dir is not None else config.output_dir)
    if write:
        _check_output_dir(target, digest)
    dataset = dataset if dataset is not None else config.dataset.load(base_dir)

    train_configs: dict[str, TrainConfig] = {}
    grid_rows: dict[str, list[dict]] = {}
    for spec in config.models:
        base = spec.train_config(config.train)
        if config.grid:
            found = grid_search(dataset, spec.kind, config.grid, seed=config.seed, base=base,
                                setting=config.setting, nl=spec.nl, metric=config.utility_metric,
                                eps_r=spec.eps_r, progress=progress)
            base = found.best
            grid_rows[spec.label] = found.rows
        train_configs[spec.label] = base

    cells = experiment_cells(config)
    logger.info(f"experiment {config.name}: {len(cells)} cells, {jobs} job(s), hash {digest[:12]}")
    job_args = [(dataset, config, cell, train_configs[cell.model.label]) for cell in cells]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(tqdm(pool.map(_run_cell_job, job_args), total=len(cells), desc=config.name,
                                 disable=not progress))
    else:
        outcomes = [_run_cell_job(args) for args in tqdm(job_args, desc=config.name, disable=not progress)]

    views = phase_views(dataset, config.setting)
    truth_rows = [{**row, "model": "", "epsilon": math.nan, "seed": math.nan}
                  for row in homophily_profile(views.inference.graph, views.inference.labels,
                                               dataset.num_classes).to_rows("truth")]
    report = ExperimentReport(
        config=config,
        config_hash=digest,
        utility=_frame([o.utility for o in outcomes if o.utility is not None], UTILITY_COLUMNS),
        attacks=_frame([row for o in outcomes for row in o.attacks], ATTACK_COLUMNS),
        homophily=_frame(truth_rows + [row for o in outcomes for row in o.homophily], HOMOPHILY_COLUMNS),
        ledgers=[o.ledger for o in outcomes if o.ledger is not None],
        failures=[o.error for o in outcomes if o.error is not None],
        grid=grid_rows,
        pair_results=[entry for o in outcomes for entry in o.pair_results],
    )
    if write:
        report.write(target)
    if report.failures:
        logger.error(f"{len(report.failures)} of {len(cells)} cells failed")
    return report
