"""Constraint propagation and simplification for refinement nodes."""
from __future__ import annotations

from typing import Optional

from ..core.errors import Inconsistent, Pruned
from ..core.model import Binding, Domain, TaskNetwork
from ..core.state import State
from ..core.terms import _walk, is_ground, is_var, normalize, subst_terms, unify
from .node import RefinementNode


def task_actions(net: TaskNetwork, domain: Domain) -> dict:
    """Operator instances of the primitive tasks, possibly with free variables."""
    ops = domain.operator_map
    return {t.id: ops[t.name].instantiate(t.args) for t in net.tasks if t.primitive}


def consistent_unifier(a: tuple, b: tuple, net: TaskNetwork) -> Optional[dict]:
    """Most general unifier of ``a`` and ``b`` that respects the separations of ``net``."""
    mgu = unify(a, b)
    if mgu is None:
        return None
    for s in net.bindings:
        if not s.equal and _walk(s.left, mgu) == _walk(s.right, mgu):
            return None
    return normalize(mgu)


def can_precede(net: TaskNetwork, u: str, t: str) -> bool:
    return u != t and not net.precedes(t, u)


def _var_key(v: str):
    base, _, num = v.partition("#")
    return (int(num) if num.isdigit() else -1, base)


def propagate(n: RefinementNode) -> RefinementNode:
    """Check the ordering for cycles and fold equality bindings into the node.

    Each class of codesignated terms collapses to its constant, or to one
    representative variable. Separations that can no longer hold raise
    :class:`Inconsistent`; separations between distinct constants are dropped.
    """
    net = n.network
    try:
        net.closure
    except ValueError as exc:
        raise Inconsistent(str(exc)) from None
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    equal = [b for b in net.bindings if b.equal]
    for b in equal:
        ra, rb = find(b.left), find(b.right)
        if ra != rb:
            parent[ra] = rb
    classes = {}
    for term in list(parent):
        classes.setdefault(find(term), []).append(term)
    sigma = {}
    for members in classes.values():
        consts = sorted({m for m in members if not is_var(m)})
        if len(consts) > 1:
            raise Inconsistent(f"{consts[0]} and {consts[1]} codesignated")
        rep = consts[0] if consts else min(members, key=_var_key)
        for m in members:
            if is_var(m) and m != rep:
                sigma[m] = rep
    separations = []
    for b in net.bindings:
        if b.equal:
            continue
        left, right = sigma.get(b.left, b.left), sigma.get(b.right, b.right)
        if left == right:
            raise Inconsistent(f"{b} contradicts the codesignations")
        if not is_var(left) and not is_var(right):
            continue
        if not is_var(left):
            left, right = right, left
        separations.append(Binding(left, right, False))
    separations = tuple(dict.fromkeys(separations))
    if not sigma and len(separations) == len(net.bindings):
        return n
    out = TaskNetwork(
        tuple(t.substitute(sigma) for t in net.tasks),
        net.ordering,
        separations,
        tuple(dict.fromkeys(c.substitute(sigma) for c in net.constraints)),
    )
    return n.with_(
        network=out,
        links=tuple(dict.fromkeys(l.substitute(sigma) for l in n.links)),
        trace=tuple(r.substitute(sigma) for r in n.trace),
        roots=tuple((i, name, subst_terms(args, sigma)) for i, name, args in n.roots),
    )


def simplify(n: RefinementNode, s0: State, domain: Domain) -> RefinementNode:
    """Drop constraints already decided true; raise :class:`Pruned` on one decided false.

    Only constraints on primitive tasks are evaluated. A precondition known
    from the initial state is dropped once no compound task and no possible
    deleter can come before its consumer. It is unsatisfiable when nothing,
    not even the initial state, could supply it and no compound task could
    still add a supplier.
    """
    net = n.network
    actions = task_actions(net, domain)
    compound = [t.id for t in net.tasks if not t.primitive]
    keep, changed = [], False
    for c in net.constraints:
        t = net.get(c.first)
        if c.kind == "between":
            if net.precedes(c.second, c.first):
                raise Pruned(f"{c}: {c.second} precedes {c.first}")
            keep.append(c)
            continue
        if not t.primitive:
            keep.append(c)
            continue
        if c.kind == "after":
            act = actions[t.id]
            if c.atom in act.add:
                changed = True
                continue
            if is_ground(c.atom) and c.atom in act.delete:
                raise Pruned(f"{c}: {t.id} deletes it")
            keep.append(c)
            continue
        if (c.first, c.atom) in n.linked:
            keep.append(c)
            continue
        if any(can_precede(net, u, t.id) for u in compound):
            keep.append(c)
            continue
        others = [u for u in net.tasks if u.primitive and can_precede(net, u.id, t.id)]
        if is_ground(c.atom) and c.atom in s0:
            threatened = any(consistent_unifier(d, c.atom, net) is not None
                             for u in others for d in actions[u.id].delete)
            if not threatened:
                changed = True
                continue
        supplied = any(consistent_unifier(f, c.atom, net) is not None
                       for f in s0.index.get(c.atom[0], ()))
        supplied = supplied or any(consistent_unifier(a, c.atom, net) is not None
                                   for u in others for a in actions[u.id].add)
        if not supplied:
            raise Pruned(f"{c}: nothing can supply it")
        keep.append(c)
    if not changed:
        return n
    out = TaskNetwork(net.tasks, net.ordering, net.bindings, tuple(keep))
    return n.with_(network=out)
