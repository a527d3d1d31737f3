"""Executable linearisations of primitive networks."""
from __future__ import annotations

from typing import Optional

from ..core.errors import NonGroundNetwork
from ..core.model import Domain, TaskNetwork, id_key
from ..core.ops import applicable
from ..core.state import State
from ..core.terms import fmt_atom, is_ground


def linearise(tn: TaskNetwork, s0: State, domain: Domain) -> Optional[tuple]:
    """First total order of ``tn`` that is executable and meets its state constraints.

    Candidates at each position are tried in id order. Returns ``(ids,
    states)`` with ``states[0] == s0``, or ``None``.
    """
    for t in tn.tasks:
        if not t.primitive:
            raise ValueError(f"{t} is not primitive")
        if not is_ground(t.atom):
            raise NonGroundNetwork(f"{t} has free variables")
    for c in tn.constraints:
        if not is_ground(c.atom):
            raise NonGroundNetwork(f"constraint {c} has free variables")
    ops = domain.operator_map
    actions = {t.id: ops[t.name].instantiate(t.args) for t in tn.tasks}
    preds = {t.id: set() for t in tn.tasks}
    for a, b in tn.ordering:
        preds[b].add(a)
    before, after, opens, closes = {}, {}, {}, {}
    for c in tn.constraints:
        if c.kind == "before":
            before.setdefault(c.first, []).append(c.atom)
        elif c.kind == "after":
            after.setdefault(c.first, []).append(c.atom)
        else:
            opens.setdefault(c.first, []).append(c)
            closes.setdefault(c.second, []).append(c)
    ordered = sorted(tn.by_id, key=id_key)
    placed, seq, states = set(), [], [s0]

    def rec(active):
        if len(seq) == len(ordered):
            return not active
        state = states[-1]
        for tid in ordered:
            if tid in placed or not preds[tid] <= placed:
                continue
            if any(c.first not in placed for c in closes.get(tid, ())):
                continue
            if not all(a in state for a in before.get(tid, ())):
                continue
            action = actions[tid]
            if not applicable(action, state):
                continue
            nxt = state.successor(action.delete, action.add)
            if not all(a in nxt for a in after.get(tid, ())):
                continue
            still = [c for c in active if c.second != tid] + list(opens.get(tid, ()))
            if not all(c.atom in nxt for c in still):
                continue
            placed.add(tid)
            seq.append(tid)
            states.append(nxt)
            if rec(still):
                return True
            placed.discard(tid)
            seq.pop()
            states.pop()
        return False

    if rec([]):
        return tuple(seq), tuple(states)
    return None


def describe(tn: TaskNetwork, order) -> list:
    return [f"{tid}: {fmt_atom(tn.get(tid).atom)}" for tid in order]
