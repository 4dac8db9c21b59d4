# Laplace mechanism and the privacy-budget planner / ledger

from .budget import *
from .mechanism import *

__all__ = ["MechanismError", "laplace_from_uniform", "laplace_sample", "laplace_noise", "laplace_scale",
           "DEGREE_VECTOR_SENSITIVITY", "ADJACENCY_SENSITIVITY", "EDGE_COUNT_SENSITIVITY",
           "BudgetError", "OverspendError", "DoubleChargeError", "AllocationError",
           "BudgetPlan", "BudgetLedger", "LedgerEntry", "plan_budget", "charge", "INFINITY"]
