"""Counter-based random streams.

Every (seed, chunk, block) triple owns an independent Philox stream, so a
sample's draws depend only on its chunk and never on worker scheduling.
"""

from __future__ import annotations

import numpy as np

CHUNK = 1 << 16
TRUNCATION_KEY = 0xFFFFFFFF  # reserved "block" slot for the omitted-block stream


def check_seed(seed: int) -> int:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def stream(seed: int, chunk: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(int(chunk), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def chunks(samples: int, chunk: int = CHUNK) -> list[tuple[int, int, int]]:
    """(chunk index, first sample, size) covering 0..samples-1."""
    return [(c, s, min(chunk, samples - s)) for c, s in enumerate(range(0, samples, chunk))]
