"""Small shared helpers: worker-pool mapping under the CAZ_THREADS cap."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count(explicit=None) -> int:
    """Resolve the worker count: explicit argument, then CAZ_THREADS, then 1."""
    if explicit is not None:
        return max(1, int(explicit))
    env = os.environ.get("CAZ_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


def parallel_map(fn, items, workers=None):
    """Order-preserving map; results are keyed by position so scheduling
    cannot change any downstream reduction."""
    n = worker_count(workers)
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (8 * n))
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
