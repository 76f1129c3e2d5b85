"""Thread-count configuration and an order-preserving parallel map."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from .core import UsageError

T = TypeVar("T")
R = TypeVar("R")

ENV_VAR = "RLCM_KMS_THREADS"


def thread_count() -> int:
    """Positive integer from ``RLCM_KMS_THREADS``; 1 when unset."""
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{ENV_VAR} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"{ENV_VAR} must be a positive integer, got {raw!r}")
    return n


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """``[fn(x) for x in items]``, possibly on a thread pool; result order is input order."""
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
