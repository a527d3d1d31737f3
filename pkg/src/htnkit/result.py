"""Search outcomes and statistics shared by both engines."""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Optional

from .core.errors import HTNError
from .core.model import Plan


class Status(enum.Enum):
    FOUND = "found"
    NO_SOLUTION = "no-solution"
    BUDGET_EXHAUSTED = "budget-exhausted"

    @property
    def exit_code(self) -> int:
        return {"found": 0, "no-solution": 1, "budget-exhausted": 2}[self.value]


class BudgetExhausted(HTNError):
    """Raised inside a search when a budget limit is hit."""


@dataclass
class SearchStats:
    nodes: int = 0
    decompositions: int = 0
    applications: int = 0
    backtracks: int = 0
    max_depth: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchResult:
    """Outcome of one engine run.

    ``plans`` is filled in all-solutions mode; ``complete`` is false when the
    budget cut the enumeration short. Plan-engine runs also carry the solution
    network and the threat log.
    """

    status: Status
    plan: Optional[Plan] = None
    stats: SearchStats = field(default_factory=SearchStats)
    plans: tuple = ()
    complete: bool = True
    solution: object = None
    threat_log: tuple = ()
    engine: str = "state"

    @property
    def found(self) -> bool:
        return self.status is Status.FOUND

    @property
    def exit_code(self) -> int:
        return self.status.exit_code
