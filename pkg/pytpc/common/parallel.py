""" Thread pool helpers for independent per-slice and per-view work.

The environment variable THREADS caps the number of worker threads; unset,
empty or 1 means sequential execution. Results are always returned in input
order, so outputs do not depend on the number of threads.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def num_threads():
    """ Number of worker threads requested through THREADS (at least 1). """
    value = os.environ.get("THREADS", "").strip()
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        raise ValueError("THREADS must be a positive integer, got {!r}".format(value))


def parallel_map(func, items, threads=None):
    """ Apply func to every item, possibly in a thread pool.

    Args:
        func (callable): function of one argument.
        items (iterable): inputs.
        threads (int): number of threads, defaults to num_threads().

    Returns:
        list of func(item) in input order.
    """
    items = list(items)
    if threads is None:
        threads = num_threads()
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))
