import argparse
import json
import logging
import math
from pathlib import Path
import sys

import numpy as np
import pandas as pd
from tabulate import tabulate

from lpgnet.attacks import (DEFAULT_DELTA, AttackKind, DegreeBand, PairMode, SimilarityMetric, linkteller_scores,
                            lpa_scores, sample_eval_pairs)
from lpgnet.evaluation import (STANDARD_GRID, ExperimentConfig, UtilityMetric, experiment_plan, grid_search,
                               load_experiment_config, run_experiment, utility_score)
from lpgnet.graph import (BIPARTITE_DEFAULTS, generate_bipartite, generate_erdos_renyi, graph_stats,
                          homophily_profile, load_dataset_dir, phase_views, write_dataset)
from lpgnet.models import DEFAULT_EPS_R, MANIFEST_NAME, load_model, train_model
from lpgnet.nn import TrainConfig
from lpgnet.types import ModelKind, Setting, parse_enum, to_plain
from lpgnet.utils.config import format_epsilon, load_config, parse_epsilon, resolve_output_dir
from lpgnet.utils.errors import ConfigError, LpgnetError
from lpgnet.utils.logger_config import make_logger, setup_logging

__all__ = ["main", "build_parser", "RUN_RECORD"]

logger = make_logger("cli")

RUN_RECORD = "run.json"


def _enum_arg(enum_cls):
    def parse(text: str):
        try:
            return parse_enum(enum_cls, text)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e)) from e
    parse.__name__ = enum_cls.__name__
    return parse


def _enum_list_arg(enum_cls):
    item = _enum_arg(enum_cls)

    def parse(text: str):
        values = tuple(item(part) for part in text.split(",") if part.strip())
        if not values:
            raise argparse.ArgumentTypeError(f"expected a comma-separated list of {enum_cls.__name__}")
        return values
    parse.__name__ = f"{enum_cls.__name__} list"
    return parse


def _epsilon_arg(text: str) -> float:
    try:
        return parse_epsilon(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _record_run(out_dir: Path, command: str, params: dict) -> Path:
    """Resolved parameters of a run, echoed next to its artifacts."""
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / RUN_RECORD
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"command": command, "params": to_plain(params)}, f, indent=2, sort_keys=True)
    return path


def _print_table(rows, headers="keys"):
    print(tabulate(rows, headers=headers, tablefmt="github", floatfmt=".4f"))


def _output_dir(args) -> Path:
    return resolve_output_dir(args.out)


# --- generate ---------------------------------------------------------------

def cmd_generate(args) -> int:
    out_dir = _output_dir(args)
    if args.kind == "bipartite":
        params = {"n1": args.n1, "n2": args.n2, "p_edge": args.p_edge, "flip1": args.flip1, "flip2": args.flip2}
        dataset = generate_bipartite(**params, seed=args.seed)
    else:
        params = {"num_nodes": args.nodes, "num_edges": args.edges, "num_classes": args.classes,
                  "num_features": args.features}
        dataset = generate_erdos_renyi(**params, seed=args.seed)
    write_dataset(dataset, out_dir)
    _record_run(out_dir, "generate", {"kind": args.kind, "seed": args.seed, **params})
    stats = graph_stats(dataset.graph)
    _print_table([{"kind": args.kind, **stats.to_record(), "classes": dataset.num_classes,
                   "features": dataset.features.shape[1]}])
    return 0


# --- train ------------------------------------------------------------------

def _train_config(args) -> TrainConfig:
    config = TrainConfig.from_dict(load_config(args.config)) if args.config else TrainConfig()
    overrides = {name: getattr(args, name) for name in ("lr", "dropout", "hid_s", "hid_n", "epochs", "weight_decay")
                 if getattr(args, name) is not None}
    if overrides:
        config = config.updated(**overrides)
    return config.with_seed(args.seed)


def cmd_train(args) -> int:
    dataset = load_dataset_dir(args.data)
    config = _train_config(args)
    grid_rows = None
    if args.grid:
        found = grid_search(dataset, args.model, STANDARD_GRID, seed=args.seed, base=config, setting=args.setting,
                            nl=args.nl, metric=args.metric, eps_r=args.eps_r)
        config, grid_rows = found.best, found.rows

    model = train_model(args.model, dataset, args.setting, args.eps, args.nl, config, args.eps_r)
    inference = phase_views(dataset, args.setting).inference
    predictions = np.argmax(model.predict_logits(inference), axis=1)
    score = utility_score(args.metric, predictions[inference.rows], inference.labels[inference.rows],
                          dataset.num_classes)

    out_dir = _output_dir(args)
    model.save(out_dir)
    if model.ledger is not None:
        model.ledger.write_json(out_dir / "ledger.json")
    if grid_rows is not None:
        pd.DataFrame(grid_rows).to_csv(out_dir / "grid.csv", index=False)
    _record_run(out_dir, "train", {"model": args.model, "data": str(args.data), "setting": args.setting,
                                   "eps": format_epsilon(args.eps), "nl": args.nl, "eps_r": args.eps_r,
                                   "train": config.to_record(), "grid": bool(args.grid)})
    with open(out_dir / "metrics.json", "w", encoding="utf-8") as f:
        json.dump({args.metric.value: score}, f, indent=2)

    row = {"model": args.model.value, "setting": args.setting.value, "eps": format_epsilon(args.eps),
           args.metric.value: score}
    if model.ledger is not None:
        row.update({f"spent[{pool}]": total for pool, total in model.ledger.totals().items()})
    _print_table([row])
    return 0


# --- infer ------------------------------------------------------------------

def _model_setting(model_dir: Path, requested: Setting | None) -> Setting:
    if requested is not None:
        return requested
    with open(model_dir / MANIFEST_NAME, "r", encoding="utf-8") as f:
        setting = json.load(f).get("setting")
    return Setting(setting) if setting else Setting.Transductive


def _model_epsilon(model_dir: Path) -> float | str | None:
    record = model_dir / RUN_RECORD
    if not record.exists():
        return None
    with open(record, "r", encoding="utf-8") as f:
        return json.load(f).get("params", {}).get("eps")


def cmd_infer(args) -> int:
    model = load_model(args.model)
    dataset = load_dataset_dir(args.data)
    setting = _model_setting(Path(args.model), args.setting)
    inference = phase_views(dataset, setting).inference
    logits = model.predict_logits(inference)

    out_dir = _output_dir(args)
    out_dir.mkdir(parents=True, exist_ok=True)
    np.save(out_dir / "logits.npy", logits)
    predictions = np.argmax(logits, axis=1)
    pd.DataFrame({"node": np.arange(inference.num_nodes), "prediction": predictions, "label": inference.labels}) \
        .to_csv(out_dir / "predictions.csv", index=False)
    if model.ledger is not None:
        model.ledger.write_json(out_dir / "ledger.json")
    _record_run(out_dir, "infer", {"model": str(args.model), "data": str(args.data), "setting": setting})

    score = utility_score(UtilityMetric.MicroF1, predictions[inference.rows], inference.labels[inference.rows],
                          dataset.num_classes)
    _print_table([{"model": model.kind.value, "nodes": inference.num_nodes, "micro_f1": score}])
    return 0


# --- attack -----------------------------------------------------------------

def cmd_attack(args) -> int:
    model = load_model(args.model)
    dataset = load_dataset_dir(args.data)
    setting = _model_setting(Path(args.model), args.setting)
    inference = phase_views(dataset, setting).inference
    oracle = model.oracle(inference)
    posteriors = oracle(inference.features)
    mode = args.mode or (PairMode.InductiveSubgraph if setting.inductive else PairMode.TransductiveSampled)
    out_dir = _output_dir(args)
    context = {"model": model.kind.value, "epsilon": _model_epsilon(Path(args.model))}

    rows = []
    for attack_seed in range(args.seed, args.seed + args.seeds):
        pairs = sample_eval_pairs(inference.graph, mode, args.k, args.band, attack_seed, nodes=inference.rows,
                                  band_size=args.band_size)
        results = []
        if AttackKind.Lpa in args.attacks:
            results += [(m.value, lpa_scores(posteriors, pairs, m, attack_seed)) for m in args.metrics]
        if AttackKind.LinkTeller in args.attacks:
            results.append(("", linkteller_scores(oracle, inference.features, pairs, args.delta, attack_seed)))
        for similarity, result in results:
            result.write_to(out_dir / "pairs", result.file_stem(similarity), **context, similarity=similarity)
            rows.append({"model": model.kind.value, **result.summary(similarity=similarity)})

    out_dir.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(rows)
    frame.to_csv(out_dir / "attacks.csv", index=False)
    _record_run(out_dir, "attack", {"model": str(args.model), "data": str(args.data), "setting": setting,
                                    "attacks": list(args.attacks), "metrics": list(args.metrics), "seeds": args.seeds,
                                    "seed": args.seed, "k": args.k, "mode": mode, "band": args.band,
                                    "band_size": args.band_size, "delta": args.delta})
    summary = frame.groupby(["attack", "similarity"], sort=False)["auc"].agg(
        mean="mean", std=lambda s: float(np.std(s, ddof=0)), seeds="count").reset_index()
    _print_table(summary)
    return 0


# --- experiment -------------------------------------------------------------

def _experiment_config(args) -> ExperimentConfig:
    config = load_experiment_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.train_seeds is not None:
        overrides["train_seeds"] = args.train_seeds
    if args.attack_seeds is not None:
        overrides["attack_seeds"] = args.attack_seeds
    return config.with_overrides(**overrides) if overrides else config


def cmd_experiment(args) -> int:
    config = _experiment_config(args)
    if args.dry_run:
        plan = experiment_plan(config)
        print(f"experiment {config.name}: setting {config.setting.value}, {config.train_seeds} train seed(s), "
              f"{config.attack_seeds} attack seed(s), {int(plan['seeds'].sum())} cells")
        _print_table(plan)
        return 0

    base_dir = Path(args.config).resolve().parent
    out = args.out if args.out is not None else config.output_dir
    report = run_experiment(config, jobs=args.jobs, out_dir=out, progress=not args.quiet, base_dir=base_dir)
    _print_table(report.summary())
    if report.failures:
        print(f"{len(report.failures)} cell(s) failed:", file=sys.stderr)
        for failure in report.failures:
            print(f"  {failure}", file=sys.stderr)
        return 1
    return 0


# --- stats ------------------------------------------------------------------

def cmd_stats(args) -> int:
    dataset = load_dataset_dir(args.data)
    stats = graph_stats(dataset.graph)
    split = dataset.split
    _print_table([{**stats.to_record(), "classes": dataset.num_classes, "features": dataset.features.shape[1],
                   "train": len(split.train), "val": len(split.val), "test": len(split.test)}])
    print()
    profile = homophily_profile(dataset.graph, dataset.labels, dataset.num_classes)
    _print_table(profile.to_rows("truth"))
    isolated = int((~profile.defined).sum())
    if isolated:
        print(f"\n{isolated} isolated node(s) excluded from the homophily averages")
    return 0


# --- parser -----------------------------------------------------------------

def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--logs-dir", default="./logs", help="directory for the rotating run log")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="lpgnet", description="Edge-private graph learning and link-stealing "
                                                                "attack evaluation.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", parents=[common], help="write a synthetic dataset")
    gen.add_argument("kind", choices=["bipartite", "erdos-renyi"])
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default="data")
    gen.add_argument("--n1", type=int, default=BIPARTITE_DEFAULTS["n1"])
    gen.add_argument("--n2", type=int, default=BIPARTITE_DEFAULTS["n2"])
    gen.add_argument("--p-edge", type=float, default=BIPARTITE_DEFAULTS["p_edge"])
    gen.add_argument("--flip1", type=float, default=BIPARTITE_DEFAULTS["flip1"])
    gen.add_argument("--flip2", type=float, default=BIPARTITE_DEFAULTS["flip2"])
    gen.add_argument("--nodes", type=int, default=2708)
    gen.add_argument("--edges", type=int, default=5429)
    gen.add_argument("--classes", type=int, default=2)
    gen.add_argument("--features", type=int, default=8)
    gen.set_defaults(handler=cmd_generate)

    train = sub.add_parser("train", parents=[common], help="train one model and save its checkpoint")
    train.add_argument("model", type=_enum_arg(ModelKind))
    train.add_argument("--data", required=True, type=Path)
    train.add_argument("--setting", type=_enum_arg(Setting), default=Setting.Transductive)
    train.add_argument("--eps", type=_epsilon_arg, default=math.inf, help="total budget, or 'inf' for no DP")
    train.add_argument("--nl", type=int, default=1)
    train.add_argument("--eps-r", type=float, default=DEFAULT_EPS_R)
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--config", help="YAML or JSON file with training options")
    train.add_argument("--grid", action="store_true", help="tune over the standard grid at eps = inf first")
    train.add_argument("--metric", type=_enum_arg(UtilityMetric), default=UtilityMetric.MicroF1)
    train.add_argument("--lr", type=float)
    train.add_argument("--dropout", type=float)
    train.add_argument("--hid-s", type=int)
    train.add_argument("--hid-n", type=int)
    train.add_argument("--epochs", type=int)
    train.add_argument("--weight-decay", type=float)
    train.add_argument("--out", default="model")
    train.set_defaults(handler=cmd_train)

    infer = sub.add_parser("infer", parents=[common], help="logits and predictions of a saved model")
    infer.add_argument("--model", required=True, type=Path)
    infer.add_argument("--data", required=True, type=Path)
    infer.add_argument("--setting", type=_enum_arg(Setting))
    infer.add_argument("--out", default="inference")
    infer.set_defaults(handler=cmd_infer)

    attack = sub.add_parser("attack", parents=[common], help="link-stealing attacks against a saved model")
    attack.add_argument("--model", required=True, type=Path)
    attack.add_argument("--data", required=True, type=Path)
    attack.add_argument("--setting", type=_enum_arg(Setting))
    attack.add_argument("--attacks", type=_enum_list_arg(AttackKind), default=(AttackKind.Lpa, AttackKind.LinkTeller))
    attack.add_argument("--metrics", type=_enum_list_arg(SimilarityMetric), default=(SimilarityMetric.Cosine,))
    attack.add_argument("--seeds", type=int, default=5)
    attack.add_argument("--seed", type=int, default=0)
    attack.add_argument("--k", type=int, default=500)
    attack.add_argument("--mode", type=_enum_arg(PairMode))
    attack.add_argument("--band", type=_enum_arg(DegreeBand), default=DegreeBand.All)
    attack.add_argument("--band-size", type=int, default=500)
    attack.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    attack.add_argument("--out", default="attacks")
    attack.set_defaults(handler=cmd_attack)

    exp = sub.add_parser("experiment", parents=[common], help="run a configured experiment grid")
    exp.add_argument("config")
    exp.add_argument("--out")
    exp.add_argument("--jobs", type=int, default=1)
    exp.add_argument("--seed", type=int)
    exp.add_argument("--train-seeds", type=int)
    exp.add_argument("--attack-seeds", type=int)
    exp.add_argument("--dry-run", action="store_true", help="print the resolved cells and budgets only")
    exp.add_argument("--quiet", action="store_true", help="no progress bars")
    exp.set_defaults(handler=cmd_experiment)

    stats = sub.add_parser("stats", parents=[common], help="graph statistics and homophily profile")
    stats.add_argument("--data", required=True, type=Path)
    stats.set_defaults(handler=cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    setup_logging(run_name=f"lpgnet-{args.command}", logs_dir=args.logs_dir, level=getattr(logging, args.log_level))
    try:
        return args.handler(args)
    except (LpgnetError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
