import os
from concurrent.futures import ThreadPoolExecutor


def resolve_threads(threads=None):
    if threads is None:
        threads = int(os.environ.get("PSI_LAB_THREADS", "1") or 1)
    return max(1, int(threads))


def ordered_map(fn, items, threads=None):
    """``[fn(x) for x in items]``, optionally on a thread pool; order is preserved."""
    items = list(items)
    n = resolve_threads(threads)
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
