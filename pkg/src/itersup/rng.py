"""Deterministic stream derivation for all Monte Carlo work.

Every simulation routine takes a ``(seed, stream_id)`` pair instead of a
shared generator.  Streams are counter-based (Philox), so chunked work can
be scheduled on any number of threads in any order and still produce the
same draws; a nonzero ``salt`` partitions the counter space further for
one-off resimulations that must not disturb the parent stream.
"""
from __future__ import annotations

import numpy as np


def philox_stream(seed: int, stream_id: int, salt: int = 0) -> np.random.Generator:
    """Generator for the given (seed, stream) cell of the Philox key space.

    Distinct (seed, stream_id, salt) triples give non-overlapping streams:
    the key is (seed, stream_id) and salt offsets the 256-bit counter by
    salt * 2**128, far beyond any realistic draw count.
    """
    if not 0 <= seed < 2 ** 64:
        raise ValueError(f"seed must fit in uint64, got {seed}")
    if not 0 <= stream_id < 2 ** 64:
        raise ValueError(f"stream_id must fit in uint64, got {stream_id}")
    if not 0 <= salt < 2 ** 64:
        raise ValueError(f"salt must fit in uint64, got {salt}")
    key = np.array([seed, stream_id], dtype=np.uint64)
    counter = np.array([0, 0, salt, 0], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=key))
