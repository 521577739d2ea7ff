"""Deterministic seed derivation for replicated experiments.

Every stochastic component takes a plain integer seed.  Replications derive
their seeds from a master seed and an index path via SeedSequence hashing, so
results do not depend on execution order or worker count.
"""

from __future__ import annotations

import numpy as np


def derive_seed(master_seed: int, *path: int) -> int:
    """Derive an independent child seed from ``master_seed`` and an index path.

    Counter-based: the same (master_seed, path) always yields the same child,
    and distinct paths yield statistically independent streams.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, np.uint64)[0])
