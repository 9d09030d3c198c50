"""Deterministic random streams.

Every replication draws from its own Philox counter-based generator keyed by
``SeedSequence(seed, spawn_key=(index,))``. A stream depends only on the base
seed and the replication index, so serial and threaded runs agree bitwise.
"""
import numpy as np

from .errors import InputError

SEED_MAX = 2 ** 64 - 1


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) <= SEED_MAX:
        raise InputError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def stream(seed: int, index: int = 0) -> np.random.Generator:
    """Generator for replication ``index`` under base ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))
