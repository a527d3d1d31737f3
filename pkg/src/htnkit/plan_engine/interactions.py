"""Harmful interactions between tasks and the establishment of preconditions."""
from __future__ import annotations

from ..core.errors import Inconsistent, UnknownThreatKind
from ..core.model import INIT, Binding, Domain, StateConstraint, id_key
from ..core.state import State
from ..core.terms import is_var
from .constraints import can_precede, consistent_unifier, propagate, task_actions
from .node import CausalLink, RefinementNode, Threat, add_constraints


def _between(net, u, producer, consumer) -> bool:
    """Can ``u`` be ordered after ``producer`` and before ``consumer``?"""
    if u in (producer, consumer):
        return False
    if producer != INIT and net.precedes(u, producer):
        return False
    return not net.precedes(consumer, u)


def _deletes(action, atom, net) -> bool:
    return any(consistent_unifier(d, atom, net) is not None for d in action.delete)


def _producers(net, actions, s0, c):
    """Possible suppliers of an unlinked precondition: INIT first, then tasks."""
    out = []
    if any(consistent_unifier(f, c.atom, net) is not None for f in s0.index.get(c.atom[0], ())):
        out.append(INIT)
    for t in net.tasks:
        if t.primitive and can_precede(net, t.id, c.first):
            if any(consistent_unifier(a, c.atom, net) is not None for a in actions[t.id].add):
                out.append(t.id)
    return out


def detect_interactions(n: RefinementNode, s0: State, domain: Domain, resources=(),
                        established_only: bool = False) -> list:
    """Threats in ``n``'s network.

    Deleted-condition threats are found against every causal link and, unless
    ``established_only``, against every possible supplier of a precondition
    that is not linked yet. Two tasks that threaten each other are reported
    once, as a double-cross. Resource threats pair unordered tasks that use
    the same declared resource object.
    """
    net = n.network
    actions = task_actions(net, domain)
    prims = [t.id for t in net.tasks if t.primitive]
    found = {}

    def note(u, consumer, atom, producer):
        found.setdefault((u, consumer, atom), Threat("deleted-condition", u, consumer, atom, producer))

    for link in n.links:
        for u in prims:
            if _between(net, u, link.producer, link.consumer) and _deletes(actions[u], link.atom, net):
                note(u, link.consumer, link.atom, link.producer)
    if not established_only:
        for c in n.agenda:
            producers = _producers(net, actions, s0, c)
            for u in prims:
                if not _deletes(actions[u], c.atom, net):
                    continue
                for p in producers:
                    if _between(net, u, p, c.first):
                        note(u, c.first, c.atom, p)
                        break

    threats = list(found.values())
    pos = net.position
    pairs = {}
    for th in threats:
        pairs.setdefault((th.clobberer, th.victim), th)
    crossed = set()
    out = []
    for th in threats:
        key = (th.clobberer, th.victim)
        back = pairs.get((th.victim, th.clobberer))
        if back is None:
            out.append(th)
            continue
        if frozenset(key) in crossed:
            continue
        crossed.add(frozenset(key))
        first, second = (th, back) if pos[th.clobberer] < pos[th.victim] else (back, th)
        out.append(Threat("double-cross", first.clobberer, first.victim, first.atom, None, second.atom))

    if resources:
        declared = set(resources)
        ops = domain.operator_map
        used = []
        for t in net.tasks:
            if t.primitive:
                objs = [o for o in ops[t.name].resource_args(t.args) if o in declared]
                used.append((t.id, objs))
        for i, (a, objs_a) in enumerate(used):
            for b, objs_b in used[i + 1:]:
                if net.precedes(a, b) or net.precedes(b, a):
                    continue
                for o in objs_a:
                    if o in objs_b:
                        out.append(Threat("resource", a, b, ("resource", o)))
                        break
    return out


def _child(n, note, ordering=(), bindings=(), links=()):
    try:
        net = add_constraints(n.network, ordering=ordering, bindings=bindings)
    except ValueError:
        return None
    child = n.with_(network=net, links=n.links + tuple(links), log=n.log + ((note,) if note else ()),
                    depth=n.depth + 1)
    try:
        return propagate(child)
    except Inconsistent:
        return None


def resolve_threat(n: RefinementNode, th: Threat, domain: Domain) -> list:
    """Children of ``n`` in which ``th`` can no longer occur.

    Promotion orders the clobberer before the producer, demotion the consumer
    before the clobberer, and separation forces one variable of the clash
    apart. Children with an ordering cycle or contradictory bindings are
    dropped. A double-cross cannot be resolved by ordering; when one of its
    clashes rests on unification, separation is still offered.
    """
    if th.kind == "double-cross":
        return _separations(n, th, [(th.clobberer, th.atom), (th.victim, th.other)], domain)
    if th.kind != "deleted-condition":
        raise UnknownThreatKind(f"cannot resolve a {th.kind} threat")
    children = []
    if th.producer != INIT:
        c = _child(n, f"{th} => promote: {th.clobberer} before {th.producer}",
                   ordering=[(th.clobberer, th.producer)])
        if c is not None:
            children.append(c)
    c = _child(n, f"{th} => demote: {th.victim} before {th.clobberer}",
               ordering=[(th.victim, th.clobberer)])
    if c is not None:
        children.append(c)
    return children + _separations(n, th, [(th.clobberer, th.atom)], domain)


def _separations(n, th, clashes, domain) -> list:
    """Children that keep each clobberer's deletions apart from its atom.

    ``clashes`` lists ``(clobberer, atom)`` pairs.
    """
    net = n.network
    actions = task_actions(net, domain)
    children, seen = [], set()
    for clobberer, atom in clashes:
        for d in actions[clobberer].delete:
            mgu = consistent_unifier(d, atom, net)
            if not mgu:
                continue
            for var, term in mgu.items():
                left, right = (var, term) if is_var(var) else (term, var)
                sep = Binding(left, right, False)
                if sep in seen:
                    continue
                seen.add(sep)
                c = _child(n, f"{th} => separate: {left} != {right}", bindings=[sep])
                if c is not None:
                    children.append(c)
    return children


def establish(c: StateConstraint, n: RefinementNode, s0: State, domain: Domain) -> list:
    """One child per way an existing supplier can provide ``c``.

    Candidates are facts of the initial state, in state order, then tasks
    that can come before the consumer, in id order. No task is ever added.
    """
    net = n.network
    children = []
    for f in s0.index.get(c.atom[0], ()):
        mgu = consistent_unifier(f, c.atom, net)
        if mgu is None:
            continue
        child = _child(n, None, bindings=[Binding(k, v) for k, v in mgu.items()],
                       links=[CausalLink(INIT, c.first, c.atom)])
        if child is not None:
            children.append(child)
    actions = task_actions(net, domain)
    for t in sorted(net.tasks, key=lambda t: id_key(t.id)):
        if not t.primitive or not can_precede(net, t.id, c.first):
            continue
        for a in actions[t.id].add:
            mgu = consistent_unifier(a, c.atom, net)
            if mgu is None:
                continue
            child = _child(n, None, ordering=[(t.id, c.first)],
                           bindings=[Binding(k, v) for k, v in mgu.items()],
                           links=[CausalLink(t.id, c.first, c.atom)])
            if child is not None:
                children.append(child)
    return children
