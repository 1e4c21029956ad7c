"""Deterministic seed-stream plumbing.

A single master seed is split into independent child streams, one per
replicate and one per operation inside a replicate, so that any replicate
can be re-run in isolation without re-running the ones before it.
"""

from __future__ import annotations

import numpy as np

Seed = "int | np.random.SeedSequence | np.random.Generator | None"


def as_rng(seed) -> np.random.Generator:
    """Coerce an int / SeedSequence / Generator / None into a Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def replicate_seed(master_seed: int, replicate: int) -> np.random.SeedSequence:
    """Child seed for one replicate, derivable without spawning the others."""
    return np.random.SeedSequence(master_seed, spawn_key=(replicate,))


def op_streams(seed, n: int) -> list[np.random.Generator]:
    """Split a seed into ``n`` independent per-operation generators."""
    if isinstance(seed, np.random.Generator):
        return seed.spawn(n)
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return [np.random.default_rng(s) for s in seed.spawn(n)]
