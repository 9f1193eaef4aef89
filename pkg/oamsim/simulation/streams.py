"""Independent random streams keyed by (seed, stream, block).

Each stochastic concern draws from its own stream and each pulse block from
its own substream, so a block's numbers do not depend on how blocks are
distributed over workers.
"""
from enum import IntEnum

import numpy as np


class Stream(IntEnum):
    PAIRS = 0
    SIGNAL = 1
    IDLER = 2
    TOMOGRAPHY = 3


def block_rng(seed: int, stream: Stream, block: int = 0) -> np.random.Generator:
    """Generator for one (stream, block) substream of the run seed."""
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(int(stream), block))
    return np.random.default_rng(sequence)


def thinned_indices(rng: np.random.Generator, n: int, q: float) -> np.ndarray:
    """
    Indices in [0, n) that each succeed independently with probability q.

    Successes are reached by geometric gaps instead of n Bernoulli draws, so
    the cost scales with the number of successes.
    """
    if n <= 0 or q <= 0:
        return np.empty(0, dtype=np.int64)
    if q >= 1:
        return np.arange(n, dtype=np.int64)

    expected = n * q
    chunk = int(expected + 6 * np.sqrt(expected) + 16)
    parts = []
    position = -1
    while True:
        gaps = rng.geometric(q, size=chunk)
        indices = position + np.cumsum(gaps)
        inside = indices[indices < n]
        parts.append(inside)
        if inside.size < indices.size:
            break
        position = int(indices[-1])
    return np.concatenate(parts).astype(np.int64)
