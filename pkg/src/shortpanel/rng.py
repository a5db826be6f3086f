"""Deterministic random streams and chunked parallel evaluation.

Monte-Carlo work (limit-law draws, bootstrap replicates) is split into fixed
chunks of ``CHUNK`` consecutive draws.  Chunk ``k`` always receives the same
generator, derived from ``(seed, *key, k)``, and is always evaluated as one
block, so the output does not depend on how chunks are assigned to workers.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

CHUNK = 256

# stream purposes
DATA = 0
MVN = 1
BOOT = 2

R = TypeVar("R")


def resolve_seed(seed: int | None) -> int:
    """Return ``seed`` unchanged, or fresh OS entropy when it is ``None``."""
    if seed is None:
        return int(np.random.SeedSequence().entropy)
    if int(seed) < 0:
        raise ValueError("seed must be non-negative")
    return int(seed)


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator addressed by ``(seed, *key)``."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    )


def derive_seed(seed: int, *key: int) -> int:
    """An integer seed for a sub-computation addressed by ``key``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    hi, lo = ss.generate_state(2, dtype=np.uint64)
    return (int(hi) << 64) | int(lo)


def chunk_ranges(start: int, stop: int, chunk: int = CHUNK) -> list[tuple[int, int, int]]:
    """``(chunk_index, lo, hi)`` triples covering draw indices ``[start, stop)``.

    ``start`` must be a multiple of ``chunk`` so chunk boundaries are fixed.
    """
    if start % chunk:
        raise ValueError("start must be aligned to the chunk size")
    return [(lo // chunk, lo, min(lo + chunk, stop)) for lo in range(start, stop, chunk)]


def map_ordered(fn: Callable[..., R], items: Sequence, workers: int = 1) -> list[R]:
    """``[fn(*item) for item in items]``, optionally on a thread pool."""
    if workers is None or workers <= 1 or len(items) <= 1:
        return [fn(*item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda item: fn(*item), items))
