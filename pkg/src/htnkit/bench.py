"""Scaling sweeps over generated logistics problems."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Union

from .core.model import Budget
from .generate import gen_logistics_problem, logistics_domain_text
from .io.parser import parse_domain
from .plan_engine import plan_po
from .state_engine import plan_state
from .validate import validate_plan

ENGINES = {"state": plan_state, "plan": plan_po}


@dataclass(frozen=True)
class BenchRow:
    problem: str
    boxes: int
    cities: int
    locs_per_city: int
    seed: int
    engine: str
    status: str
    exit_code: int
    valid: Optional[bool]
    plan_length: Optional[int]
    seconds: float
    stats: dict = field(default_factory=dict)
    error: str = ""


@dataclass(frozen=True)
class BenchReport:
    """Rows sorted by box count, then engine."""

    rows: tuple

    @property
    def ok(self) -> bool:
        return all(r.exit_code == 0 and r.valid for r in self.rows)

    @property
    def total_seconds(self) -> float:
        return sum(r.seconds for r in self.rows)

    def to_dict(self) -> dict:
        return {"rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchReport":
        return cls(tuple(BenchRow(**r) for r in doc["rows"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        head = f"{'boxes':>5} {'engine':<6} {'status':<17} {'exit':>4} {'valid':<5} " \
               f"{'steps':>5} {'nodes':>7} {'seconds':>8}"
        lines = [head]
        for r in self.rows:
            steps = "-" if r.plan_length is None else str(r.plan_length)
            lines.append(f"{r.boxes:>5} {r.engine:<6} {r.status:<17} {r.exit_code:>4} "
                         f"{str(r.valid):<5} {steps:>5} {r.stats.get('nodes', 0):>7} "
                         f"{r.seconds:>8.3f}")
            if r.error:
                lines.append(f"      error: {r.error}")
        lines.append(f"total {self.total_seconds:.3f}s")
        return "\n".join(lines) + "\n"


def _row(domain, boxes, cities, locs, seed, engine, budget) -> BenchRow:
    problem = gen_logistics_problem(boxes, cities, locs, seed)
    start = time.perf_counter()
    try:
        result = ENGINES[engine](domain, problem, budget)
    except Exception as exc:  # one bad row must not stop the sweep
        return BenchRow(problem.name, boxes, cities, locs, seed, engine, "error", 3, None, None,
                        time.perf_counter() - start, {}, f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    valid = bool(validate_plan(result.plan, problem, domain)) if result.plan is not None else None
    return BenchRow(problem.name, boxes, cities, locs, seed, engine, result.status.value,
                    result.exit_code, valid, len(result.plan) if result.plan else None,
                    elapsed, result.stats.as_dict())


def cmd_bench(boxes: Iterable[int] = range(1, 6), engines: Iterable[str] = ("state",),
              cities: int = 2, locs_per_city: int = 3, seed: int = 0,
              budget: Union[Budget, int, None] = None) -> BenchReport:
    """Solve one generated problem per box count with each engine.

    The same seed is used for every size, so each problem extends the one
    before it by one delivery. An integer ``budget`` caps decompositions.
    """
    if isinstance(budget, int):
        budget = Budget(max_decompositions=budget)
    engines = tuple(engines)
    for e in engines:
        if e not in ENGINES:
            raise ValueError(f"unknown engine {e!r}")
    domain = parse_domain(logistics_domain_text(), "logistics.htd")
    rows = [_row(domain, b, cities, locs_per_city, seed, e, budget)
            for b in sorted(set(boxes)) for e in engines]
    return BenchReport(tuple(rows))
