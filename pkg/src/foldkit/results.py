"""Three-valued outcomes used by the bounded decision procedures."""
from __future__ import annotations

import enum
from dataclasses import dataclass


class Answer(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class Outcome(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class Check:
    """Result of a predicate that quantifies over subcomplexes.

    ``witness`` is the tuple of cell indices of the first failing subcomplex
    (in increasing bitmask order) when ``outcome`` is FALSE.
    """

    outcome: Outcome
    witness: tuple[int, ...] | None = None
    explored: int = 0

    @property
    def holds(self) -> bool | None:
        if self.outcome is Outcome.BUDGET_EXCEEDED:
            return None
        return self.outcome is Outcome.TRUE
