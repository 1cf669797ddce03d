"""Exception types and resource budgets shared across the package."""

from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass, replace

DEFAULT_SPAIR_BUDGET = 200_000
DEFAULT_CHART_BUDGET = 500


class TGRError(Exception):
    pass


class ResourceLimitError(TGRError):
    """A configured computational budget was exhausted. The answer is unknown, not negative."""


class InternalConsistencyError(TGRError):
    """Two computations that must agree did not (a bug, or an unlucky prime)."""


class StrategyError(TGRError):
    """The requested strategy cannot settle the question exactly for this input."""


@dataclass(frozen=True)
class Limits:
    spair_budget: int = DEFAULT_SPAIR_BUDGET
    chart_budget: int = DEFAULT_CHART_BUDGET


_LIMITS: contextvars.ContextVar[Limits] = contextvars.ContextVar("tgr_limits", default=Limits())


def current_limits() -> Limits:
    return _LIMITS.get()


@contextmanager
def limits(**changes):
    """Temporarily override budgets, e.g. ``with limits(chart_budget=50): ...``."""
    token = _LIMITS.set(replace(_LIMITS.get(), **{k: v for k, v in changes.items() if v is not None}))
    try:
        yield _LIMITS.get()
    finally:
        _LIMITS.reset(token)
