import json
import math

import numpy as np
import pandas as pd
import pytest

from lpgnet.attacks import PairMode
from lpgnet.evaluation import (STANDARD_GRID, ExperimentConfig, ExperimentError, MetricError, ModelSpec, PairsConfig,
                               UtilityMetric, enumerate_grid, experiment_cells, experiment_hash, experiment_plan,
                               grid_search, load_experiment_config, micro_f1, minority_class, rare_f1, run_experiment)
from lpgnet.nn import TrainConfig
from lpgnet.types import ModelKind, Setting
from lpgnet.utils.errors import ConfigError


def _experiment(tmp_path, **changes) -> ExperimentConfig:
    record = {
        "name": "tiny",
        "dataset": {"kind": "bipartite", "params": {"n1": 40, "n2": 30, "p_edge": 0.2}, "seed": 1},
        "models": ["mlp", {"kind": "lpgnet", "nl": 1}],
        "epsilons": ["inf", 2],
        "train": {"epochs": 5, "hid_s": 8, "hid_n": 1, "dropout": 0.0},
        "pairs": {"k": 20},
        "train_seeds": 2,
        "attack_seeds": 2,
        "output_dir": str(tmp_path / "out"),
    }
    record.update(changes)
    return ExperimentConfig.from_dict(record)


@pytest.mark.unit
class TestMetrics:
    @pytest.mark.parametrize("seed", range(5))
    def test_micro_f1_is_accuracy(self, seed):
        rng = np.random.default_rng(seed)
        truth = rng.integers(0, 5, size=200)
        predictions = rng.integers(0, 5, size=200)
        assert micro_f1(predictions, truth, 5) == pytest.approx(np.mean(predictions == truth))

    def test_rare_f1(self):
        assert rare_f1([0, 0, 1, 1], [0, 0, 0, 1]) == pytest.approx(2.0 / 3.0)

    def test_rare_class_ties_pick_one(self):
        assert minority_class([0, 1, 0, 1]) == 1
        assert minority_class([1, 1, 0]) == 0

    def test_rare_f1_without_positive_predictions(self):
        assert rare_f1([0, 0, 0], [0, 0, 1]) == 0.0

    def test_rare_f1_needs_binary(self):
        with pytest.raises(MetricError):
            rare_f1([0, 2], [0, 1])

    def test_length_mismatch(self):
        with pytest.raises(MetricError):
            micro_f1([0, 1], [0], 2)

    def test_label_range(self):
        with pytest.raises(MetricError):
            micro_f1([0, 3], [0, 1], 2)


@pytest.mark.unit
class TestExperimentConfig:
    def test_defaults(self, tmp_path):
        config = _experiment(tmp_path)
        assert config.setting is Setting.Transductive
        assert config.epsilons == (math.inf, 2.0)
        assert [m.label for m in config.models] == ["mlp", "lpgnet-1"]
        assert config.pairs.mode_for(config.setting) is PairMode.TransductiveSampled
        assert config.pairs.mode_for(Setting.InductiveEvolving) is PairMode.InductiveSubgraph

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError, match="budget"):
            _experiment(tmp_path, budget=3)

    def test_duplicate_labels(self, tmp_path):
        with pytest.raises(ConfigError, match="unique"):
            _experiment(tmp_path, models=["gcn", "gcn"])

    def test_model_overrides(self):
        spec = ModelSpec.from_dict({"kind": "gcn", "name": "gcn-1layer", "overrides": {"hid_n": 0}})
        assert spec.train_config(TrainConfig()).hid_n == 0
        with pytest.raises(ConfigError):
            ModelSpec.from_dict({"kind": "gcn", "overrides": {"depth": 1}})

    def test_unknown_model_kind(self, tmp_path):
        with pytest.raises(ConfigError):
            _experiment(tmp_path, models=["transformer"])

    def test_bad_pairs(self):
        with pytest.raises(ConfigError):
            PairsConfig.from_dict({"k": 0})
        with pytest.raises(ConfigError):
            PairsConfig.from_dict({"dump_scores": "yes"})

    def test_cells_run_baselines_once(self, tmp_path):
        cells = experiment_cells(_experiment(tmp_path))
        assert [(c.model.label, c.epsilon, c.seed) for c in cells] == [
            ("mlp", math.inf, 0), ("mlp", math.inf, 1),
            ("lpgnet-1", math.inf, 0), ("lpgnet-1", math.inf, 1),
            ("lpgnet-1", 2.0, 0), ("lpgnet-1", 2.0, 1),
        ]

    def test_plan_lists_allocations(self, tmp_path):
        plan = experiment_plan(_experiment(tmp_path, setting="inductive_evolving", models=[{"kind": "lpgnet", "nl": 2}],
                                           epsilons=[6]))
        row = plan.iloc[0]
        assert (row["train"], row["validation"], row["inference"]) == (1.0, 1.0, 1.0)

    def test_hash_ignores_output_dir(self, tmp_path):
        a = _experiment(tmp_path)
        b = a.with_overrides(output_dir="elsewhere")
        assert experiment_hash(a) == experiment_hash(b)
        assert experiment_hash(a) != experiment_hash(a.with_overrides(train_seeds=3))

    def test_load_yaml_and_json(self, tmp_path):
        (tmp_path / "e.yaml").write_text("name: y\ndataset: {kind: bipartite}\nmodels: [mlp]\n", encoding="utf-8")
        (tmp_path / "e.json").write_text(json.dumps({"name": "j", "dataset": {"kind": "bipartite"},
                                                     "models": ["gcn"]}), encoding="utf-8")
        assert load_experiment_config(tmp_path / "e.yaml").name == "y"
        assert load_experiment_config(tmp_path / "e.json").models[0].kind is ModelKind.Gcn

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_experiment_config(tmp_path / "missing.json")


@pytest.mark.unit
class TestGrid:
    def test_standard_grid_size_and_order(self):
        configs = enumerate_grid(TrainConfig(), STANDARD_GRID)
        assert len(configs) == 72
        first, last = configs[0], configs[-1]
        assert (first.lr, first.hid_s, first.hid_n, first.dropout) == (0.005, 16, 2, 0.1)
        assert (last.lr, last.hid_s, last.hid_n, last.dropout) == (0.05, 256, 3, 0.5)

    def test_grid_search_picks_best_validation_score(self, small_bipartite):
        base = TrainConfig(epochs=5, hid_s=8, hid_n=1, dropout=0.0)
        result = grid_search(small_bipartite, ModelKind.Mlp, {"lr": [0.001, 0.05]}, base=base)
        scores = [row["val_score"] for row in result.rows]
        assert len(scores) == 2
        assert result.best_score == max(scores)
        assert result.best.lr == [0.001, 0.05][scores.index(max(scores))]


@pytest.mark.integration
class TestRunExperiment:
    def test_report_files_and_rows(self, tmp_path):
        config = _experiment(tmp_path)
        report = run_experiment(config, progress=False)
        out = tmp_path / "out"
        for name in ("config.json", "utility.csv", "attacks.csv", "ledger.json", "homophily.csv", "summary.csv"):
            assert (out / name).exists()
        assert report.ok
        assert len(report.utility) == 6
        # 6 cells x 2 attack seeds x (lpa + linkteller)
        assert len(report.attacks) == 24
        assert len(report.ledgers) == 4
        with open(out / "config.json", encoding="utf-8") as f:
            assert json.load(f)["hash"] == experiment_hash(config)

    def test_baseline_attack_extremes(self, tmp_path):
        report = run_experiment(_experiment(tmp_path), write=False, progress=False)
        attacks = report.attacks
        linkteller = attacks[attacks["attack"] == "linkteller"]
        assert (linkteller[linkteller["model"] == "mlp"]["auc"] == 0.5).all()
        assert (linkteller[linkteller["model"] == "lpgnet-1"]["auc"] == 0.5).all()

    def test_summary_recomputes_from_rows(self, tmp_path):
        run_experiment(_experiment(tmp_path), progress=False)
        utility = pd.read_csv(tmp_path / "out" / "utility.csv")
        summary = pd.read_csv(tmp_path / "out" / "summary.csv")
        for (model, eps), group in utility.groupby(["model", "epsilon"]):
            row = summary[(summary["model"] == model) & (summary["epsilon"] == eps)
                          & (summary["measure"] == "micro_f1")].iloc[0]
            assert row["mean"] == pytest.approx(group["utility"].mean())
            assert row["std"] == pytest.approx(np.std(group["utility"], ddof=0))
            assert row["count"] == len(group)

    def test_rerun_is_byte_identical(self, tmp_path):
        config = _experiment(tmp_path)
        run_experiment(config, progress=False)
        first = {name: (tmp_path / "out" / name).read_bytes() for name in ("utility.csv", "attacks.csv")}
        run_experiment(config, progress=False)
        assert all((tmp_path / "out" / name).read_bytes() == data for name, data in first.items())

    def test_refuses_foreign_output_dir(self, tmp_path):
        run_experiment(_experiment(tmp_path), progress=False)
        with pytest.raises(ExperimentError, match="different configuration"):
            run_experiment(_experiment(tmp_path, train_seeds=1), progress=False)

    def test_failed_cells_are_reported(self, tmp_path):
        report = run_experiment(_experiment(tmp_path, models=["mlp"], pairs={"k": 10_000}), write=False,
                                progress=False)
        assert not report.ok
        assert len(report.failures) == 2
        assert "mlp eps=inf seed=0" in report.failures[0]

    def test_rare_f1_metric(self, tmp_path):
        report = run_experiment(_experiment(tmp_path, models=["mlp"], utility_metric="rare_f1", attacks=["lpa"]),
                                write=False, progress=False)
        assert (report.utility["metric"] == UtilityMetric.RareF1.value).all()
        assert report.utility["utility"].between(0.0, 1.0).all()

    def test_homophily_rows(self, tmp_path):
        report = run_experiment(_experiment(tmp_path, models=["mlp"], attacks=["lpa"]), write=False, progress=False)
        truth = report.homophily[report.homophily["source"] == "truth"]
        assert len(truth) == 2
        assert np.allclose(truth["avg_homophily"], 0.0)
        assert (report.homophily["source"] == "predicted").sum() == 2 * 2

    def test_pair_scores_dumped_on_request(self, tmp_path):
        config = _experiment(tmp_path, models=["mlp"], attacks=["lpa"], pairs={"k": 20, "dump_scores": True})
        run_experiment(config, progress=False)
        pairs_dir = tmp_path / "out" / "pairs"
        assert len(list(pairs_dir.glob("*.csv"))) == 4
        scores = pd.read_csv(pairs_dir / "mlp-epsinf-train1-lpa-cosine-seed0.csv")
        assert len(scores) == 40
        with open(pairs_dir / "mlp-epsinf-train1-lpa-cosine-seed0.json", encoding="utf-8") as f:
            summary = json.load(f)
        assert (summary["model"], summary["epsilon"], summary["train_seed"]) == ("mlp", "inf", 1)

    def test_pair_scores_not_dumped_by_default(self, tmp_path):
        run_experiment(_experiment(tmp_path, models=["mlp"], attacks=["lpa"]), progress=False)
        assert not (tmp_path / "out" / "pairs").exists()
