"""Order-preserving fan-out capped by ``COREFDIV_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "COREFDIV_THREADS"
_MIN_BATCH = 256


def worker_count() -> int:
    """Worker cap from the environment; 1 (sequential) when unset or invalid."""
    raw = os.environ.get(ENV_VAR, "").strip()
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def ordered_map(fn, items):
    """``list(map(fn, items))``, possibly threaded; result order is input order."""
    items = list(items)
    n = worker_count()
    if n == 1 or len(items) < _MIN_BATCH:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
