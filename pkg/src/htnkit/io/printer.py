"""Canonical text for domains and problems.

``parse_domain(print_domain(d)) == d`` holds for every domain the parser can
produce; the same goes for problems.
"""
from __future__ import annotations

from ..core.model import Domain, Problem, TaskNetwork
from ..core.terms import fmt_atom


def _lits(pos, neg):
    return [fmt_atom(a) for a in pos] + [f"(not {fmt_atom(a)})" for a in neg]


def _section(keyword, items):
    return "(" + " ".join([keyword] + list(items)) + ")"


def _network(net: TaskNetwork, indent: str) -> list:
    pad = indent + "  "
    lines = [indent + "(:network"]
    body = [pad + _section(":tasks", [f"({t.id} {fmt_atom(t.atom)})" for t in net.tasks])]
    if net.ordering:
        pos = net.position
        pairs = sorted(net.ordering, key=lambda e: (pos[e[0]], pos[e[1]]))
        body.append(pad + _section(":order", [f"({a} {b})" for a, b in pairs]))
    for c in net.constraints:
        a = fmt_atom(c.atom)
        if c.kind == "before":
            body.append(pad + f"(:before {a} {c.first})")
        elif c.kind == "after":
            body.append(pad + f"(:after {c.first} {a})")
        else:
            body.append(pad + f"(:between {c.first} {a} {c.second})")
    if net.bindings:
        body.append(pad + _section(":bind", [str(b) for b in net.bindings]))
    lines.extend(body)
    lines[-1] += ")"
    return lines


def print_domain(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    if domain.protections:
        lines.append("  (:requirements :protections)")
    if domain.predicates:
        lines.append("  (:predicates")
        for name, n in domain.predicates:
            args = "".join(f" ?a{i}" for i in range(1, n + 1))
            lines.append(f"    ({name}{args})")
        lines[-1] += ")"
    for op in domain.operators:
        lines.append(f"  (:operator {fmt_atom((op.name,) + op.params)}")
        parts = [
            _section(":pre", _lits(op.pre_pos, op.pre_neg)),
            _section(":del", [fmt_atom(a) for a in op.delete]),
            _section(":add", [fmt_atom(a) for a in op.add]),
        ]
        if op.protect:
            parts.append(_section(":protect", [fmt_atom(a) for a in op.protect]))
        if op.unprotect:
            parts.append(_section(":unprotect", [fmt_atom(a) for a in op.unprotect]))
        if op.resources:
            parts.append(_section(":resources", op.resources))
        lines.extend("    " + p for p in parts)
        lines[-1] += ")"
    groups = []
    for m in domain.methods:
        if groups and groups[-1][0].name == m.name and groups[-1][0].params == m.params:
            groups[-1].append(m)
        else:
            groups.append([m])
    for group in groups:
        lines.append(f"  (:method {fmt_atom(group[0].head)}")
        for m in group:
            lines.append(f"    (:branch {m.rank}")
            if m.pre_pos or m.pre_neg:
                lines.append("      " + _section(":pre", _lits(m.pre_pos, m.pre_neg)))
            lines.extend(_network(m.network, "      "))
            lines[-1] += ")"
        lines[-1] += ")"
    lines[-1] += ")"
    return "\n".join(lines) + "\n"


def print_problem(problem: Problem) -> str:
    lines = [f"(define (problem {problem.name})", f"  (:domain {problem.domain_name})"]
    if problem.resources:
        lines.append("  " + _section(":resources", problem.resources))
    lines.append("  (:init")
    lines.extend(f"    {fmt_atom(f)}" for f in problem.init)
    lines[-1] += ")"
    lines.extend(_network(problem.network, "  "))
    lines.append(f"  (:engine {problem.engine})")
    lines.append(f"  (:style {problem.style})")
    lines.append(f"  (:budget {problem.budget}))")
    return "\n".join(lines) + "\n"
