"""Refinement nodes, causal links and threats."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

from ..core.model import INIT, Binding, StateConstraint, TaskNetwork
from ..core.terms import fmt_atom, ground


@dataclass(frozen=True)
class CausalLink:
    """``producer`` makes ``atom`` true for ``consumer``; ``producer`` may be INIT."""

    producer: str
    consumer: str
    atom: tuple

    def substitute(self, sigma) -> "CausalLink":
        return CausalLink(self.producer, self.consumer, ground(self.atom, sigma))

    def __str__(self):
        return f"{self.producer} --{fmt_atom(self.atom)}--> {self.consumer}"


@dataclass(frozen=True)
class Threat:
    """An interaction between tasks of one network.

    deleted-condition: ``clobberer`` may delete ``atom`` between ``producer``
    and ``victim``. double-cross: ``clobberer`` deletes ``atom``, a
    precondition of ``victim``, and ``victim`` deletes ``other``, one of
    ``clobberer``. resource: both tasks use resource ``atom[1]`` unordered.
    """

    kind: str
    clobberer: str
    victim: str
    atom: tuple
    producer: Optional[str] = None
    other: Optional[tuple] = None

    def __str__(self):
        if self.kind == "deleted-condition":
            return (f"deleted-condition: {self.clobberer} deletes {fmt_atom(self.atom)} "
                    f"needed by {self.victim} (from {self.producer})")
        if self.kind == "double-cross":
            return (f"double-cross: {self.clobberer} deletes {fmt_atom(self.atom)} of "
                    f"{self.victim}, {self.victim} deletes {fmt_atom(self.other)} of {self.clobberer}")
        return f"resource: {self.clobberer} and {self.victim} both use {self.atom[1]}"


@dataclass(frozen=True)
class RefinementNode:
    """A vertex of the plan space.

    ``agenda`` is derived: the precondition obligations on primitive tasks
    that no causal link supports yet. ``roots`` are the tasks of the initial
    network as ``(id, name, args)``; ``log`` holds threat resolutions.
    """

    network: TaskNetwork
    links: tuple = ()
    trace: tuple = ()
    log: tuple = ()
    depth: int = 0
    roots: tuple = ()

    @cached_property
    def linked(self) -> frozenset:
        return frozenset((l.consumer, l.atom) for l in self.links)

    @cached_property
    def agenda(self) -> tuple:
        net = self.network
        return tuple(c for c in net.constraints
                     if c.kind == "before" and net.get(c.first).primitive
                     and (c.first, c.atom) not in self.linked)

    def ready(self, c: StateConstraint) -> bool:
        """True when no compound task could still come before the consumer."""
        net = self.network
        after = net.closure[c.first]
        return not any(not t.primitive and t.id not in after and t.id != c.first
                       for t in net.tasks)

    def with_(self, **changes) -> "RefinementNode":
        fields = dict(network=self.network, links=self.links, trace=self.trace,
                      log=self.log, depth=self.depth, roots=self.roots)
        fields.update(changes)
        return RefinementNode(**fields)


def add_constraints(net: TaskNetwork, ordering=(), bindings=(), constraints=()) -> TaskNetwork:
    """A copy of ``net`` with extra constraints; ordering cycles raise ``ValueError``."""
    out = TaskNetwork(
        net.tasks,
        net.ordering | frozenset(ordering),
        tuple(dict.fromkeys(net.bindings + tuple(bindings))),
        tuple(dict.fromkeys(net.constraints + tuple(constraints))),
    )
    out.closure
    return out


__all__ = ["CausalLink", "Threat", "RefinementNode", "add_constraints", "INIT", "Binding"]
