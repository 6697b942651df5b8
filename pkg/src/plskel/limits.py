"""Resource caps and work counters.

Both live in context variables so that concurrent callers (threads, asyncio
tasks) each see their own settings.
"""
from __future__ import annotations

import contextvars
from collections import Counter
from contextlib import contextmanager
from dataclasses import dataclass, replace

DEFAULT_CELL_CAP = 10_000
DEFAULT_ROW_CAP = 20_000


@dataclass(frozen=True)
class Limits:
    cell_cap: int = DEFAULT_CELL_CAP   # cells in a DNF / sign enumeration
    row_cap: int = DEFAULT_ROW_CAP     # rows produced by one elimination step


_limits = contextvars.ContextVar("plskel_limits", default=Limits())
_counters = contextvars.ContextVar("plskel_counters", default=None)


def current() -> Limits:
    return _limits.get()


@contextmanager
def limits(**changes):
    token = _limits.set(replace(_limits.get(), **changes))
    try:
        yield _limits.get()
    finally:
        _limits.reset(token)


@contextmanager
def counting():
    """Collect work counters for the enclosed block into a fresh Counter."""
    c = Counter()
    token = _counters.set(c)
    try:
        yield c
    finally:
        _counters.reset(token)


def bump(name: str, k: int = 1) -> None:
    c = _counters.get()
    if c is not None:
        c[name] += k
