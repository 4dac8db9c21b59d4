# Dense numpy engine: normalized adjacency, MLP/GCN layers with analytic
# gradients, Adam, and full-batch training with best-snapshot selection

from .adjacency import *
from .layers import *
from .optim import *
from .train import *

__all__ = ["NormalizedAdjacency", "normalize_adjacency",
           "MlpModel", "GcnModel", "mlp_forward", "gcn_forward", "network_forward", "softmax", "cross_entropy",
           "loss_and_gradients", "save_checkpoint", "load_checkpoint",
           "Adam",
           "TrainConfig", "TrainingData", "TrainingHistory", "TrainingDivergedError",
           "fit_network", "train_mlp", "train_gcn"]
