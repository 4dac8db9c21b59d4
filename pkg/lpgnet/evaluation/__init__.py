# Evaluation harness: utility metrics, hyper-parameter grid search and the
# (model, epsilon, seed) experiment runner with its report files

from .metrics import *
from .config import *
from .grid import *
from .experiment import *

__all__ = ["MetricError", "UtilityMetric", "micro_f1", "rare_f1", "minority_class", "utility_score",
           "DatasetSpec", "ModelSpec", "PairsConfig", "ExperimentConfig", "load_experiment_config",
           "STANDARD_GRID", "DATASET_KINDS",
           "GridSearchResult", "enumerate_grid", "grid_search",
           "ExperimentError", "Cell", "CellOutcome", "ExperimentReport", "experiment_cells", "experiment_plan",
           "run_cell", "run_experiment", "experiment_hash",
           "UTILITY_COLUMNS", "ATTACK_COLUMNS", "HOMOPHILY_COLUMNS", "SUMMARY_COLUMNS"]
