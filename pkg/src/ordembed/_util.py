"""Shared plumbing: keyed RNG streams and deterministic thread fan-out."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def rng_stream(seed, *key):
    """Independent generator keyed by (seed, *key); stable across runs and schedulers."""
    if seed is None or seed < 0:
        raise ValueError("seed must be a non-negative integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *map(int, key)])))


def default_threads():
    env = os.environ.get("ORDEMBED_THREADS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def map_chunks(fn, chunks, threads):
    """Apply ``fn`` to each chunk, in order.  The merge order never depends on
    the thread count, so outputs are byte-stable for any ``threads``."""
    chunks = list(chunks)
    if threads <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, chunks))


def split_range(total, parts):
    """Split range(total) into at most ``parts`` contiguous slices."""
    parts = max(1, min(parts, total)) if total else 1
    step = (total + parts - 1) // parts
    return [range(lo, min(lo + step, total)) for lo in range(0, total, step)]
