# Graph core: file formats, synthetic generators, structural statistics
# and the per-phase views used by training and inference

from .generators import *
from .io import *
from .stats import *
from .views import *

__all__ = ["DatasetFormatError", "DatasetFiles", "load_dataset", "load_dataset_dir", "write_dataset",
           "read_edge_list", "write_edge_list",
           "generate_bipartite", "generate_erdos_renyi", "random_split", "BIPARTITE_DEFAULTS",
           "HomophilyProfile", "GraphStats", "homophily_profile", "graph_stats",
           "PhaseView", "PhaseViews", "phase_views"]
