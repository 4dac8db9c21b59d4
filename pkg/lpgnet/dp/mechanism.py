import math

import numpy as np

from lpgnet.utils.errors import LpgnetError

__all__ = ["MechanismError", "laplace_from_uniform", "laplace_sample", "laplace_noise", "laplace_scale",
           "DEGREE_VECTOR_SENSITIVITY", "ADJACENCY_SENSITIVITY", "EDGE_COUNT_SENSITIVITY"]

# edge-DP sensitivities: toggling one edge moves two degree-vector counts by 1,
# one upper-triangle entry by 1, and the edge count by 1
DEGREE_VECTOR_SENSITIVITY = 2.0
ADJACENCY_SENSITIVITY = 1.0
EDGE_COUNT_SENSITIVITY = 1.0


class MechanismError(LpgnetError, ValueError):
    pass


def _check_scale(scale: float):
    if not (math.isfinite(scale) and scale > 0):
        raise MechanismError(f"Laplace scale must be positive and finite, got {scale}")


def laplace_scale(sensitivity: float, epsilon: float) -> float:
    if not epsilon > 0:
        raise MechanismError(f"epsilon must be positive, got {epsilon}")
    return sensitivity / epsilon


def laplace_from_uniform(u, scale: float):
    """
    Inverse CDF of Laplace(0, scale) evaluated at u ∈ (0, 1).

    u = 0.5 maps to exactly 0.
    """
    _check_scale(scale)
    centered = np.asarray(u, dtype=np.float64) - 0.5
    return -scale * np.sign(centered) * np.log1p(-2.0 * np.abs(centered))


def _open_uniform(rng: np.random.Generator, size):
    u = rng.random(size)
    # random() lives on [0, 1); 0 would map to -inf
    return np.where(u == 0.0, np.nextafter(0.0, 1.0), u)


def laplace_sample(scale: float, rng: np.random.Generator) -> float:
    """One Laplace(0, scale) draw from exactly one uniform of `rng`."""
    _check_scale(scale)
    return float(laplace_from_uniform(_open_uniform(rng, None), scale))


def laplace_noise(scale: float, size, rng: np.random.Generator) -> np.ndarray:
    """Array of independent draws; element k consumes the k-th uniform of the stream."""
    _check_scale(scale)
    return laplace_from_uniform(_open_uniform(rng, size), scale)
