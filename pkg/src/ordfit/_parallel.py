"""Optional thread parallelism, capped by the ORDFIT_THREADS env var.

Work units must be independent and internally seeded; results are returned
in input order, so output is identical at any parallelism degree.  Absent
or unparseable ORDFIT_THREADS means single-threaded.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def thread_count() -> int:
    raw = os.environ.get("ORDFIT_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    workers = min(thread_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
