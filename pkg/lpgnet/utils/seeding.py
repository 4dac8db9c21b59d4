import zlib

import numpy as np


def purpose_key(purpose: str) -> int:
    return zlib.crc32(purpose.encode("utf-8"))


def derive_seed_sequence(seed: int, purpose: str, *keys: int) -> np.random.SeedSequence:
    """
    Splits one experiment seed into an independent stream per purpose.

    The entropy is the user seed; the spawn key is the CRC32 of the purpose
    name followed by any integer keys (layer index, attack seed, ...).
    """
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(purpose_key(purpose), *(int(k) for k in keys)))


def derive_rng(seed: int, purpose: str, *keys: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(seed, purpose, *keys))
