# Private and non-private node classifiers: DpGCN adjacency release,
# LPGNet training/inference on noisy cluster degree vectors, and the
# MLP / GCN baselines behind one TrainedModel interface

from .base import *
from .degree_vectors import *
from .dpgcn import *
from .lpgnet import *

__all__ = ["DegreeVectorMatrix", "cluster_degree_counts", "find_degree_vec", "hard_labels",
           "PerturbedAdjacency", "dpgcn_perturb", "upper_triangle_array", "DEFAULT_EPS_R",
           "ModelError", "CacheMissError", "TrainedLpgnet", "train_lpgnet", "lpgnet_infer", "stack_features",
           "TrainedModel", "MlpClassifier", "GcnClassifier", "LpgnetClassifier", "Oracle",
           "train_model", "load_model", "MANIFEST_NAME"]
