"""
Counter-based random streams.

A run of N trials is cut into fixed-size chunks; chunk k of purpose p draws from
Philox keyed by SeedSequence(seed, spawn_key=(k, p)). A trial's randomness
therefore depends only on (seed, trial index, purpose), never on which worker
processes the chunk or in which order.
"""

from typing import Optional

import numpy as np
from django.conf import settings

MAX_SEED = 2**64 - 1

PURPOSES = {
    "field": 0,
    "detector": 1,
    "counts": 2,
    "models": 3,
    "scenarios": 4,
}


def trials_per_chunk() -> int:
    return int(getattr(settings, "LAB_TRIALS_PER_CHUNK", 1 << 16))


def stream(seed: int, chunk: int = 0, purpose: str = "detector") -> np.random.Generator:
    if not 0 <= int(seed) <= MAX_SEED:
        raise ValueError(f"Seed {seed} is not a 64-bit unsigned integer.")
    sequence = np.random.SeedSequence(int(seed), spawn_key=(int(chunk), PURPOSES[purpose]))
    return np.random.Generator(np.random.Philox(sequence))


def chunk_layout(trials: int, size: Optional[int] = None) -> list[tuple[int, int, int]]:
    """(chunk index, first trial, number of trials) covering range(trials)."""
    size = size or trials_per_chunk()
    return [
        (index, start, min(size, trials - start))
        for index, start in enumerate(range(0, trials, size))
    ]
