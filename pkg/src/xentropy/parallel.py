"""Order-preserving fan-out of independent tasks over worker processes."""

from __future__ import annotations

import os
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor


def resolve_threads(threads: int | str | None) -> int:
    if threads in (None, "auto"):
        return max(1, os.cpu_count() or 1)
    n = int(threads)
    if n < 1:
        raise ValueError("thread count must be positive")
    return n


def ordered_map(fn: Callable, tasks: Sequence, threads: int | str | None = 1) -> list:
    """``[fn(t) for t in tasks]``, possibly in parallel; results keep task order.

    Because every task is a pure function of its arguments and results are merged
    by position, the output does not depend on the worker count.
    """
    n = min(resolve_threads(threads), len(tasks))
    if n <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, tasks))


def chunks(n_items: int, size: int) -> list[tuple[int, int]]:
    return [(start, min(start + size, n_items)) for start in range(0, n_items, size)]
