"""Process-wide knobs: Groebner budgets and worker-thread count."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass


@dataclass
class Budget:
    max_basis: int = 5000
    max_terms: int = 100_000


BUDGET = Budget()


@contextmanager
def budget(max_basis: int | None = None, max_terms: int | None = None):
    """Temporarily override the Groebner resource caps."""
    old = (BUDGET.max_basis, BUDGET.max_terms)
    if max_basis is not None:
        BUDGET.max_basis = max_basis
    if max_terms is not None:
        BUDGET.max_terms = max_terms
    try:
        yield BUDGET
    finally:
        BUDGET.max_basis, BUDGET.max_terms = old


def thread_count() -> int:
    raw = os.environ.get("INVKIT_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """``list(map(fn, items))`` on up to ``INVKIT_THREADS`` workers, input order kept."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
