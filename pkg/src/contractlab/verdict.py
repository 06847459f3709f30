"""Shared pass/fail verdict type used by every condition checker."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class ConditionVerdict:
    """Outcome of a pathwise or gridwise condition check.

    ``holds`` is True exactly when ``first_violation`` is None.  ``worst_margin``
    is the smallest slack observed across all checked indices (positive means
    the condition held with room to spare, +inf means the check was vacuous).
    """

    holds: bool
    first_violation: Optional[int]
    worst_margin: float
    detail: str = ""

    def __post_init__(self) -> None:
        if self.holds != (self.first_violation is None):
            raise ValueError("holds must be True exactly when first_violation is absent")


def passing(margin: float, detail: str = "") -> ConditionVerdict:
    return ConditionVerdict(True, None, float(margin), detail)


def vacuous(detail: str) -> ConditionVerdict:
    return ConditionVerdict(True, None, math.inf, detail)


def failing(index: int, margin: float, detail: str = "") -> ConditionVerdict:
    return ConditionVerdict(False, int(index), float(margin), detail)
