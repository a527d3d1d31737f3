"""Syntactic classification of domains by their method-call graph."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

from ..core.model import Domain, Problem, TaskNetwork


@dataclass(frozen=True)
class DomainClass:
    """``compound_setting`` is the first of primitive-only, acyclic, regular,
    recursive that applies. ``recursive`` reports a cycle in the call graph
    independently, so a regular domain can also be recursive."""

    compound_setting: str
    ordering_setting: str
    variables: str
    recursive: bool

    def as_dict(self) -> dict:
        return asdict(self)


def call_graph(domain: Domain) -> dict:
    graph = {name: set() for name in domain.compound_names}
    for m in domain.methods:
        for t in m.network.tasks:
            if not t.primitive:
                graph[m.name].add(t.name)
    return graph


def _has_cycle(graph: dict) -> bool:
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {n: WHITE for n in graph}

    def visit(n):
        colour[n] = GREY
        for nxt in sorted(graph.get(n, ())):
            c = colour.get(nxt, BLACK)
            if c == GREY or (c == WHITE and visit(nxt)):
                return True
        colour[n] = BLACK
        return False

    return any(colour[n] == WHITE and visit(n) for n in sorted(graph))


def _regular_network(net: TaskNetwork) -> bool:
    compound = [t for t in net.tasks if not t.primitive]
    if len(compound) > 1:
        return False
    if not compound:
        return True
    return not net.closure[compound[0].id]


def classify_domain(domain: Domain, problem: Optional[Problem] = None) -> DomainClass:
    networks = [m.network for m in domain.methods]
    if problem is not None:
        networks.append(problem.network)
    graph = call_graph(domain)
    cyclic = _has_cycle(graph)
    uses_compound = bool(domain.methods) or any(not t.primitive for n in networks for t in n.tasks)
    if not uses_compound:
        compound = "primitive-only"
    elif not cyclic:
        compound = "acyclic"
    elif all(_regular_network(m.network) for m in domain.methods):
        compound = "regular"
    else:
        compound = "recursive"
    ordering = "totally-ordered" if all(n.is_total() for n in networks) else "partially-ordered"
    has_vars = any(op.params for op in domain.operators) or any(m.params for m in domain.methods)
    has_vars = has_vars or any(n.variables() for n in networks)
    has_vars = has_vars or any(
        a[:1] == "?" for m in domain.methods for atom in m.pre_pos + m.pre_neg for a in atom[1:])
    return DomainClass(compound, ordering, "with" if has_vars else "without", cyclic)
