"""Domain and problem structures shared by both engines.

Everything here is an immutable value. Sets that need a reproducible order
(preconditions, effects, tasks) are stored as tuples.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional

from .terms import Atom, fmt_atom, ground, ground_all, is_var, subst_terms

PHANTOM = "!phantom"
INIT = "INIT"


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 1

    def __str__(self):
        return f"{self.file}:{self.line}:{self.column}"


def is_primitive(name: str) -> bool:
    return name[:1] == "!"


def id_key(tid: str):
    """Sort key for task ids: ids from the input first, then generated ``#N`` ids
    in numeric order."""
    if tid[:1] == "#" and tid[1:].isdigit():
        return (1, int(tid[1:]), "")
    return (0, 0, tid)


@dataclass(frozen=True)
class Action:
    """A ground operator instance."""

    name: str
    args: tuple
    pre_pos: tuple = ()
    pre_neg: tuple = ()
    delete: tuple = ()
    add: tuple = ()
    protect: tuple = ()
    unprotect: tuple = ()

    @property
    def step(self) -> tuple:
        return (self.name,) + self.args

    def __str__(self):
        return fmt_atom(self.step)


@dataclass(frozen=True)
class Operator:
    name: str
    params: tuple
    pre_pos: tuple = ()
    pre_neg: tuple = ()
    delete: tuple = ()
    add: tuple = ()
    protect: tuple = ()
    unprotect: tuple = ()
    resources: tuple = ()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def instantiate(self, args: Iterable[str]) -> Action:
        """Substitute ``args`` for the parameters. The result may still hold variables
        when ``args`` does."""
        args = tuple(args)
        if len(args) != len(self.params):
            raise ValueError(f"{self.name} takes {len(self.params)} arguments, got {len(args)}")
        sigma = dict(zip(self.params, args))
        return Action(
            self.name, args,
            ground_all(self.pre_pos, sigma), ground_all(self.pre_neg, sigma),
            ground_all(self.delete, sigma), ground_all(self.add, sigma),
            ground_all(self.protect, sigma), ground_all(self.unprotect, sigma),
        )

    def resource_args(self, args: Iterable[str]) -> tuple:
        sigma = dict(zip(self.params, args))
        return tuple(sigma[r] for r in self.resources if r in sigma)


PHANTOM_OPERATOR = Operator(PHANTOM, ())


@dataclass(frozen=True)
class TaskInstance:
    id: str
    name: str
    args: tuple = ()

    @property
    def primitive(self) -> bool:
        return is_primitive(self.name)

    @property
    def atom(self) -> tuple:
        return (self.name,) + self.args

    def substitute(self, sigma) -> "TaskInstance":
        if not sigma:
            return self
        return TaskInstance(self.id, self.name, subst_terms(self.args, sigma))

    def __str__(self):
        return f"{self.id}:{fmt_atom(self.atom)}"


@dataclass(frozen=True)
class Binding:
    """``left = right`` (codesignation) or ``left != right`` (separation)."""

    left: str
    right: str
    equal: bool = True

    def substitute(self, sigma) -> "Binding":
        return Binding(sigma.get(self.left, self.left), sigma.get(self.right, self.right), self.equal)

    def __str__(self):
        return f"({'=' if self.equal else '!='} {self.left} {self.right})"


@dataclass(frozen=True)
class StateConstraint:
    """``before(atom, first)``, ``after(first, atom)`` or ``between(first, atom, second)``."""

    kind: str
    atom: Atom
    first: str
    second: Optional[str] = None

    def tasks(self) -> tuple:
        return (self.first,) if self.second is None else (self.first, self.second)

    def substitute(self, sigma) -> "StateConstraint":
        if not sigma:
            return self
        return StateConstraint(self.kind, ground(self.atom, sigma), self.first, self.second)

    def rename(self, ids) -> "StateConstraint":
        return StateConstraint(self.kind, self.atom, ids.get(self.first, self.first),
                               None if self.second is None else ids.get(self.second, self.second))

    def __str__(self):
        a = fmt_atom(self.atom)
        if self.kind == "before":
            return f"before({a}, {self.first})"
        if self.kind == "after":
            return f"after({self.first}, {a})"
        return f"between({self.first}, {a}, {self.second})"


def closure_of(ids: Iterable[str], edges: Iterable[tuple]) -> dict:
    """Map each id to the set of ids strictly after it.

    Raises ``ValueError`` when the edges contain a cycle.
    """
    succ = {i: set() for i in ids}
    for a, b in edges:
        if a in succ and b in succ:
            succ[a].add(b)
    out = {}

    def visit(node, stack):
        if node in out:
            return out[node]
        if node in stack:
            raise ValueError(f"ordering cycle through {node}")
        stack.add(node)
        reach = set()
        for nxt in succ[node]:
            reach.add(nxt)
            reach |= visit(nxt, stack)
        stack.discard(node)
        out[node] = reach
        return reach

    for node in succ:
        visit(node, set())
    for node, reach in out.items():
        if node in reach:
            raise ValueError(f"ordering cycle through {node}")
    return out


@dataclass(frozen=True)
class TaskNetwork:
    """Labelled tasks with ordering, binding and state constraints.

    The state-based engine reads only ``tasks`` and ``ordering``. ``ordering``
    need not be transitively closed; :meth:`after` answers closure queries.
    """

    tasks: tuple = ()
    ordering: frozenset = frozenset()
    bindings: tuple = ()
    constraints: tuple = ()

    def __post_init__(self):
        ids = [t.id for t in self.tasks]
        if len(set(ids)) != len(ids):
            raise ValueError("task ids must be unique within a network")
        known = set(ids)
        for a, b in self.ordering:
            if a not in known or b not in known:
                raise ValueError(f"ordering ({a}, {b}) mentions an unknown task")
            if a == b:
                raise ValueError(f"ordering ({a}, {a}) is reflexive")
        for c in self.constraints:
            for tid in c.tasks():
                if tid not in known:
                    raise ValueError(f"constraint {c} mentions an unknown task")

    @cached_property
    def by_id(self) -> dict:
        return {t.id: t for t in self.tasks}

    @cached_property
    def position(self) -> dict:
        return {t.id: i for i, t in enumerate(self.tasks)}

    def get(self, tid: str) -> TaskInstance:
        return self.by_id[tid]

    def __contains__(self, tid) -> bool:
        return tid in self.by_id

    def __len__(self) -> int:
        return len(self.tasks)

    @cached_property
    def closure(self) -> dict:
        return closure_of(self.by_id, self.ordering)

    def precedes(self, a: str, b: str) -> bool:
        return b in self.closure[a]

    def is_acyclic(self) -> bool:
        try:
            self.closure
        except ValueError:
            return False
        return True

    @cached_property
    def _has_pred(self) -> frozenset:
        return frozenset(b for _, b in self.ordering)

    def minimal(self) -> list:
        """Tasks without a predecessor, in network order."""
        preds = self._has_pred
        return [t for t in self.tasks if t.id not in preds]

    def is_total(self) -> bool:
        c = self.closure
        ids = list(self.by_id)
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if b not in c[a] and a not in c[b]:
                    return False
        return True

    def variables(self) -> list:
        seen = {}
        for t in self.tasks:
            for a in t.args:
                if is_var(a):
                    seen.setdefault(a, None)
        for c in self.constraints:
            for a in c.atom[1:]:
                if is_var(a):
                    seen.setdefault(a, None)
        for b in self.bindings:
            for a in (b.left, b.right):
                if is_var(a):
                    seen.setdefault(a, None)
        return list(seen)

    def substitute(self, sigma) -> "TaskNetwork":
        if not sigma:
            return self
        return TaskNetwork(
            tuple(t.substitute(sigma) for t in self.tasks),
            self.ordering,
            tuple(b.substitute(sigma) for b in self.bindings),
            tuple(c.substitute(sigma) for c in self.constraints),
        )

    def without(self, tid: str) -> "TaskNetwork":
        """Drop a task together with every constraint that mentions it."""
        return TaskNetwork(
            tuple(t for t in self.tasks if t.id != tid),
            frozenset(e for e in self.ordering if tid not in e),
            self.bindings,
            tuple(c for c in self.constraints if tid not in c.tasks()),
        )


@dataclass(frozen=True)
class Method:
    """One branch of a compound task's method ladder.

    With an empty precondition this is the plain (head, network) pair used by
    the plan-based engine; with one it is the guarded triple used by the
    state-based engine. ``rank`` orders the branches of one head.
    """

    name: str
    params: tuple
    rank: int = 1
    pre_pos: tuple = ()
    pre_neg: tuple = ()
    network: TaskNetwork = TaskNetwork()
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    @property
    def label(self) -> str:
        return f"{self.name}#{self.rank}"

    @property
    def head(self) -> tuple:
        return (self.name,) + self.params


@dataclass(frozen=True)
class Domain:
    name: str
    predicates: tuple = ()
    operators: tuple = ()
    methods: tuple = ()
    protections: bool = False

    @cached_property
    def operator_map(self) -> dict:
        ops = {o.name: o for o in self.operators}
        ops.setdefault(PHANTOM, PHANTOM_OPERATOR)
        return ops

    @cached_property
    def method_map(self) -> dict:
        out = {}
        for m in self.methods:
            out.setdefault(m.name, []).append(m)
        return {k: tuple(sorted(v, key=lambda m: m.rank)) for k, v in out.items()}

    def operator(self, name: str) -> Operator:
        return self.operator_map[name]

    def methods_for(self, name: str) -> tuple:
        return self.method_map.get(name, ())

    @cached_property
    def arity(self) -> dict:
        return {name: n for name, n in self.predicates}

    @cached_property
    def compound_names(self) -> tuple:
        return tuple(self.method_map)

    @cached_property
    def static_predicates(self) -> frozenset:
        """Predicates no operator adds or deletes."""
        touched = set()
        for o in self.operators:
            touched.update(a[0] for a in o.add)
            touched.update(a[0] for a in o.delete)
        return frozenset(p for p, _ in self.predicates if p not in touched)


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    init: tuple = ()
    network: TaskNetwork = TaskNetwork()
    engine: str = "state"
    style: str = "totd"
    budget: int = 100000
    resources: tuple = ()


@dataclass(frozen=True)
class Budget:
    max_decompositions: int = 100000
    max_network_size: int = 10000

    def __post_init__(self):
        if self.max_decompositions < 1 or self.max_network_size < 1:
            raise ValueError("budget limits must be positive")


@dataclass(frozen=True)
class DecompositionRecord:
    """One decomposition step: which task, which branch, which children."""

    task: str
    name: str
    args: tuple
    method: str
    rank: int
    bindings: tuple
    children: tuple

    def substitute(self, sigma) -> "DecompositionRecord":
        if not sigma:
            return self
        return DecompositionRecord(
            self.task, self.name, subst_terms(self.args, sigma), self.method, self.rank,
            tuple((v, sigma.get(t, t)) for v, t in self.bindings),
            tuple((cid, cname, subst_terms(cargs, sigma)) for cid, cname, cargs in self.children),
        )


@dataclass(frozen=True)
class Plan:
    """A ground step sequence together with the decomposition tree that produced it.

    ``step_ids[i]`` is the id of the primitive task realised by ``steps[i]``;
    ``roots`` are the tasks of the initial network.
    """

    steps: tuple
    step_ids: tuple = ()
    roots: tuple = ()
    trace: tuple = ()

    def __len__(self):
        return len(self.steps)

    def lines(self) -> list:
        return [f"{k}: {fmt_atom(s)}" for k, s in enumerate(self.steps)]
