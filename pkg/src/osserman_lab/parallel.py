"""Deterministic chunked parallel map, capped by ``OSSERMAN_LAB_THREADS``."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "OSSERMAN_LAB_THREADS"


def thread_count() -> int:
    raw = os.environ.get(ENV_VAR, "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return k


def chunked_map(fn, items, chunk: int = 64) -> list:
    """Apply ``fn`` to consecutive slices of ``items``; results keep input order.

    ``fn`` receives a slice and returns a list of per-item results.
    """
    items = list(items) if not hasattr(items, "__getitem__") else items
    slices = [items[i : i + chunk] for i in range(0, len(items), chunk)]
    workers = min(thread_count(), len(slices))
    if workers <= 1:
        parts = [fn(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, slices))
    return [r for part in parts for r in part]
