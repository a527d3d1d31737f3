"""Core semantics: operator application, replay, binding enumeration, decomposition."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

from .. import _kernels
from .errors import (LabelMismatch, MethodNotApplicable, NonGroundError, NotApplicable,
                     UnificationFailure, UnsafeNegation)
from .model import Action, Binding, Method, StateConstraint, TaskInstance, TaskNetwork
from .state import State
from .terms import fmt_atom, fmt_pred, ground_all, is_ground, is_var, vars_of


class Fresh:
    """Monotone source of task ids and variable names for one search run."""

    def __init__(self, start: int = 1):
        self._count = itertools.count(start)

    def task_id(self) -> str:
        return f"#{next(self._count)}"

    def var(self, name: str) -> str:
        base = name.split("#", 1)[0]
        return f"{base}#{next(self._count)}"


_DEFAULT_FRESH = Fresh()


def _check_ground(action: Action):
    for atom in itertools.chain(action.pre_pos, action.pre_neg, action.add, action.delete):
        if not is_ground(atom):
            raise NonGroundError(f"{action} is not ground")


def applicable(action: Action, state: State) -> bool:
    _check_ground(action)
    facts = state.facts
    return all(a in facts for a in action.pre_pos) and not any(a in facts for a in action.pre_neg)


def missing_precondition(action: Action, state: State) -> Optional[str]:
    """Describe the first unmet precondition, or ``None`` when applicable."""
    for a in action.pre_pos:
        if a not in state:
            return f"precondition {fmt_pred(a)} absent"
    for a in action.pre_neg:
        if a in state:
            return f"negative precondition {fmt_pred(a)} present"
    return None


def apply(action: Action, state: State) -> State:
    if not applicable(action, state):
        raise NotApplicable(f"{action}: {missing_precondition(action, state)}")
    return state.successor(action.delete, action.add)


@dataclass(frozen=True)
class Replay:
    states: tuple
    failed_at: Optional[int] = None

    @property
    def ok(self) -> bool:
        return self.failed_at is None


def executable(seq: Iterable[Action], state: State) -> Replay:
    """Replay ``seq`` from ``state``.

    On success ``states`` holds s_0..s_n; otherwise ``failed_at`` is the index of
    the first inapplicable step and ``states`` the prefix reached before it.
    """
    states = [state]
    for i, action in enumerate(seq):
        if not applicable(action, states[-1]):
            return Replay(tuple(states), i)
        states.append(states[-1].successor(action.delete, action.add))
    return Replay(tuple(states))


def satisfying_bindings(pre_pos: Iterable, pre_neg: Iterable, state: State,
                        sigma: Optional[dict] = None) -> Iterator[dict]:
    """Every substitution making ``pre_pos`` hold and ``pre_neg`` fail in ``state``.

    Results extend ``sigma`` and come in a fixed order: positive atoms left to
    right, facts in state order within each atom.
    """
    pos = tuple(pre_pos)
    neg = tuple(pre_neg)
    sigma = dict(sigma) if sigma else {}
    bound = set(sigma) | set(vars_of(pos))
    loose = [v for v in vars_of(neg) if v not in bound]
    if loose:
        raise UnsafeNegation(f"variables {', '.join(loose)} occur only in negative conditions")
    return iter(_kernels.match(pos, neg, state.index, state.facts, sigma))


def rename_fresh(tn: TaskNetwork, fresh: Optional[Fresh] = None) -> TaskNetwork:
    """An isomorphic copy of ``tn`` whose task ids are new."""
    return _rename(tn, fresh or _DEFAULT_FRESH)[0]


def _rename(tn: TaskNetwork, fresh: Fresh):
    ids = {t.id: fresh.task_id() for t in tn.tasks}
    out = TaskNetwork(
        tuple(TaskInstance(ids[t.id], t.name, t.args) for t in tn.tasks),
        frozenset((ids[a], ids[b]) for a, b in tn.ordering),
        tn.bindings,
        tuple(c.rename(ids) for c in tn.constraints),
    )
    return out, ids


def local_variables(method: Method) -> list:
    """Variables of a method that are not head parameters."""
    params = set(method.params)
    atoms = list(method.pre_pos) + list(method.pre_neg)
    atoms += [t.atom for t in method.network.tasks]
    atoms += [c.atom for c in method.network.constraints]
    out = [v for v in vars_of(atoms) if v not in params]
    for b in method.network.bindings:
        for term in (b.left, b.right):
            if is_var(term) and term not in params and term not in out:
                out.append(term)
    return out


def _head_unifier(method: Method, task: TaskInstance):
    """Map head parameters onto task arguments.

    Returns ``(sigma, extra)`` where ``extra`` holds equality bindings needed when
    the task argument is itself a variable.
    """
    if task.name != method.name:
        raise LabelMismatch(f"task {task.name} cannot be decomposed by a method for {method.name}")
    if len(task.args) != len(method.params):
        raise UnificationFailure(f"{task} does not match head {fmt_atom(method.head)}")
    sigma, extra = {}, []
    for p, a in zip(method.params, task.args):
        if is_var(p):
            prior = sigma.get(p)
            if prior is None:
                sigma[p] = a
            elif prior != a:
                if not is_var(prior) and not is_var(a):
                    raise UnificationFailure(f"{task} binds {p} to both {prior} and {a}")
                extra.append(Binding(prior, a) if is_var(prior) else Binding(a, prior))
        elif is_var(a):
            extra.append(Binding(a, p))
        elif a != p:
            raise UnificationFailure(f"{task} does not match head {fmt_atom(method.head)}")
    return sigma, extra


def _inherit_order(tn_c: TaskNetwork, tid: str, new_ids: list) -> set:
    order = {e for e in tn_c.ordering if tid not in e}
    preds = [a for a, b in tn_c.ordering if b == tid]
    succs = [b for a, b in tn_c.ordering if a == tid]
    if new_ids:
        order.update((p, n) for p in preds for n in new_ids)
        order.update((n, s) for n in new_ids for s in succs)
    else:
        order.update((p, s) for p in preds for s in succs)
    return order


def _splice(tn_c: TaskNetwork, tid: str, new_tasks) -> tuple:
    out = []
    for t in tn_c.tasks:
        if t.id == tid:
            out.extend(new_tasks)
        else:
            out.append(t)
    return tuple(out)


def decompose_po(tn_c: TaskNetwork, t: Union[str, TaskInstance], m: Method,
                 fresh: Optional[Fresh] = None) -> TaskNetwork:
    """Replace compound task ``t`` by a fresh copy of ``m``'s network, inheriting
    every constraint that mentioned ``t``."""
    return decompose_po_detailed(tn_c, t, m, fresh)[0]


def decompose_po_detailed(tn_c, t, m, fresh=None):
    """Like :func:`decompose_po` but also return the new tasks."""
    fresh = fresh or _DEFAULT_FRESH
    tid = t.id if isinstance(t, TaskInstance) else t
    task = tn_c.get(tid)
    if task.primitive:
        raise LabelMismatch(f"{task} is primitive")
    sigma, extra = _head_unifier(m, task)
    for v in local_variables(m):
        sigma[v] = fresh.var(v)
    sub, _ = _rename(m.network.substitute(sigma), fresh)
    new_ids = [x.id for x in sub.tasks]
    firsts = [x.id for x in sub.minimal()]
    lasts = _maximal(sub)

    inherited = []
    for c in tn_c.constraints:
        if tid not in c.tasks():
            inherited.append(c)
            continue
        if not new_ids:
            continue
        if c.kind == "before":
            inherited += [StateConstraint("before", c.atom, x) for x in firsts]
        elif c.kind == "after":
            inherited += [StateConstraint("after", c.atom, x) for x in lasts]
        else:
            starts = lasts if c.first == tid else [c.first]
            ends = firsts if c.second == tid else [c.second]
            inherited += [StateConstraint("between", c.atom, a, b) for a in starts for b in ends]

    order = _inherit_order(tn_c, tid, new_ids)
    order.update(sub.ordering)
    net = TaskNetwork(
        _splice(tn_c, tid, sub.tasks),
        frozenset(order),
        tuple(dict.fromkeys(tn_c.bindings + tuple(extra) + sub.bindings)),
        tuple(dict.fromkeys(tuple(inherited) + sub.constraints)),
    )
    return net, sub.tasks


def _maximal(tn: TaskNetwork) -> list:
    has_succ = {a for a, _ in tn.ordering}
    return [t.id for t in tn.tasks if t.id not in has_succ]


def decompose_state(s: State, tn_c: TaskNetwork, t: Union[str, TaskInstance], m: Method,
                    sigma: Optional[dict] = None, fresh: Optional[Fresh] = None) -> TaskNetwork:
    """Decompose ``t`` with the guarded method ``m`` in state ``s``."""
    return decompose_state_detailed(s, tn_c, t, m, sigma, fresh)[0]


def decompose_state_detailed(s, tn_c, t, m, sigma=None, fresh=None):
    """Like :func:`decompose_state`, also returning the new tasks.

    ``sigma`` may bind method variables and variables of the enclosing network
    (names containing ``#``); the latter are applied network-wide.
    """
    fresh = fresh or _DEFAULT_FRESH
    tid = t.id if isinstance(t, TaskInstance) else t
    task = tn_c.get(tid)
    if task.name != m.name:
        raise LabelMismatch(f"task {task.name} cannot be decomposed by a method for {m.name}")
    sigma = dict(sigma) if sigma else {}
    outer = {k: v for k, v in sigma.items() if "#" in k}
    head_args = tuple(outer.get(a, a) for a in task.args)
    for p, a in zip(m.params, head_args):
        if is_var(p):
            prior = sigma.setdefault(p, a)
            if prior != a:
                raise UnificationFailure(f"{task} binds {p} to both {prior} and {a}")
        elif p != a:
            raise UnificationFailure(f"{task} does not match head {fmt_atom(m.head)}")
    if len(m.params) != len(task.args):
        raise UnificationFailure(f"{task} does not match head {fmt_atom(m.head)}")
    pos = ground_all(m.pre_pos, sigma)
    neg = ground_all(m.pre_neg, sigma)
    if not all(is_ground(a) for a in pos + neg):
        raise MethodNotApplicable(f"{m.label}: precondition not ground under the given bindings")
    if not all(a in s for a in pos) or any(a in s for a in neg):
        raise MethodNotApplicable(f"{m.label} is not applicable to {task}")

    local = dict(sigma)
    for v in local_variables(m):
        if v not in local:
            local[v] = fresh.var(v)
    sub_tasks = []
    ids = {}
    for x in m.network.tasks:
        nid = fresh.task_id()
        ids[x.id] = nid
        sub_tasks.append(TaskInstance(nid, x.name, tuple(local.get(a, a) for a in x.args)))
    new_ids = [x.id for x in sub_tasks]
    order = _inherit_order(tn_c, tid, new_ids)
    order.update((ids[a], ids[b]) for a, b in m.network.ordering)
    net = TaskNetwork(_splice(tn_c, tid, sub_tasks), frozenset(order))
    if outer:
        net = net.substitute(outer)
        sub_tasks = [x.substitute(outer) for x in sub_tasks]
    return net, tuple(sub_tasks)
