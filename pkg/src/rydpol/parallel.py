"""Order-preserving thread pool capped by the RYDPOL_THREADS environment variable."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def max_workers() -> int:
    raw = os.environ.get("RYDPOL_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def pmap(fn, items):
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def spawn_generators(seed: int, tasks: int) -> list[np.random.Generator]:
    """Independent PRNG streams; the result depends only on (seed, tasks)."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(tasks)]


def split_evenly(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if k < extra else 0) for k in range(parts)]
