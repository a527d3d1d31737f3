"""Brute-force plan enumeration, kept apart from both search engines.

Breadth first over (state, network) pairs: every task without a
predecessor, every method branch and every binding is expanded, and no
state is ever merged with another. Matching is done by scanning the whole
state for each precondition, which is slow but easy to trust.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

from .core.model import Domain, Problem


@dataclass(frozen=True)
class OracleResult:
    """Every plan found within the bound; ``complete`` is false when the bound cut the search."""

    plans: frozenset
    complete: bool
    expanded: int = 0

    def __len__(self):
        return len(self.plans)


def _var(t):
    return t[:1] == "?"


def _sub(terms, b):
    return tuple(b.get(t, t) for t in terms)


def _match(atom, fact, b):
    if len(atom) != len(fact) or atom[0] != fact[0]:
        return None
    out = dict(b)
    for x, y in zip(atom[1:], fact[1:]):
        x = out.get(x, x)
        if _var(x):
            out[x] = y
        elif x != y:
            return None
    return out


def _models(pos, neg, facts, b):
    """All extensions of ``b`` under which every atom of ``pos`` is a fact and none of ``neg`` is."""
    if not pos:
        for atom in neg:
            g = (atom[0],) + _sub(atom[1:], b)
            if any(_var(t) for t in g[1:]):
                raise ValueError(f"unbound variable in negative condition {g}")
            if g in facts:
                return []
        return [b]
    out = []
    for fact in facts:
        b2 = _match(pos[0], fact, b)
        if b2 is not None:
            out.extend(_models(pos[1:], neg, facts, b2))
    return out


@dataclass(frozen=True)
class _Node:
    facts: frozenset
    tasks: tuple        # (id, name, args)
    order: frozenset    # (before id, after id)
    steps: tuple
    protected: frozenset
    depth: int


def _subst_node_tasks(tasks, b):
    return tuple((i, n, _sub(a, b)) for i, n, a in tasks)


class _Enumerator:
    def __init__(self, domain: Domain, problem: Problem, protections: bool):
        self.ops = {o.name: o for o in domain.operators}
        self.methods = {}
        for m in domain.methods:
            self.methods.setdefault(m.name, []).append(m)
        for ms in self.methods.values():
            ms.sort(key=lambda m: m.rank)
        self.protections = protections
        self.counter = 0

    def fresh(self, base):
        self.counter += 1
        return f"{base}@{self.counter}"

    def children(self, n: _Node):
        later = {b for _, b in n.order}
        for task in n.tasks:
            if task[0] in later:
                continue
            if task[1].startswith("!"):
                yield from self._apply(n, task)
            else:
                yield from self._decompose(n, task)

    def _apply(self, n, task):
        tid, name, args = task
        op = self.ops.get(name)
        if op is None or len(op.params) != len(args):
            return
        theta = dict(zip(op.params, args))
        pre = [(a[0],) + _sub(a[1:], theta) for a in op.pre_pos]
        neg = [(a[0],) + _sub(a[1:], theta) for a in op.pre_neg]
        for b in _models(pre, neg, n.facts, {}):
            ground = _sub(args, b)
            if any(_var(t) for t in ground):
                continue
            full = dict(zip(op.params, ground))
            inst = lambda atoms: [(a[0],) + _sub(a[1:], full) for a in atoms]
            dels, adds = inst(op.delete), inst(op.add)
            protected = n.protected
            if self.protections:
                protected = set(protected) - set(inst(op.unprotect))
                if any(d in protected and d in n.facts for d in dels):
                    continue
                protected = frozenset(protected | set(inst(op.protect)))
            facts = (n.facts - set(dels)) | set(adds)
            rest = tuple(t for t in n.tasks if t[0] != tid)
            order = frozenset(e for e in n.order if tid not in e)
            yield _Node(facts, _subst_node_tasks(rest, b), order,
                        n.steps + ((name,) + ground,), protected, n.depth + 1)

    def _decompose(self, n, task):
        tid, name, args = task
        for m in self.methods.get(name, ()):
            if len(m.params) != len(args):
                continue
            # head unification; variables on either side may be bound
            b, ok = {}, True
            for p, a in zip(m.params, args):
                p, a = b.get(p, p), b.get(a, a)
                if p == a:
                    continue
                if _var(p):
                    b[p] = a
                elif _var(a):
                    b[a] = p
                else:
                    ok = False
                    break
            if not ok:
                continue
            b = {k: _resolve(v, b) for k, v in b.items()}
            pre = [(x[0],) + _sub(x[1:], b) for x in m.pre_pos]
            neg = [(x[0],) + _sub(x[1:], b) for x in m.pre_neg]
            for b2 in _models(pre, neg, n.facts, {}):
                full = {k: _resolve(b2.get(v, v), b2) for k, v in b.items()}
                full.update(b2)
                yield self._expand(n, task, m, full)

    def _expand(self, n, task, m, b):
        tid = task[0]
        local = dict(b)
        ids = {}
        for t in m.network.tasks:
            ids[t.id] = self.fresh("t")
        new = []
        for t in m.network.tasks:
            args = []
            for a in t.args:
                if _var(a) and a not in local:
                    local[a] = self.fresh(a)
                args.append(local.get(a, a))
            new.append((ids[t.id], t.name, tuple(args)))
        outer = {k: v for k, v in b.items() if "@" in k}
        tasks = []
        for t in n.tasks:
            if t[0] == tid:
                tasks.extend(new)
            else:
                tasks.append(t)
        preds = [x for x, y in n.order if y == tid]
        succs = [y for x, y in n.order if x == tid]
        order = {e for e in n.order if tid not in e}
        if new:
            order |= {(p, t[0]) for p in preds for t in new}
            order |= {(t[0], s) for t in new for s in succs}
        else:
            order |= {(p, s) for p in preds for s in succs}
        order |= {(ids[x], ids[y]) for x, y in m.network.ordering}
        return _Node(n.facts, _subst_node_tasks(tuple(tasks), outer), frozenset(order),
                     n.steps, n.protected, n.depth + 1)


def _resolve(v, b):
    seen = set()
    while v in b and v not in seen and b[v] != v:
        seen.add(v)
        v = b[v]
    return v


def oracle_enumerate(domain: Domain, problem: Problem, depth_bound: int = 200,
                     protections: Optional[bool] = None, max_nodes: Optional[int] = None
                     ) -> OracleResult:
    """All plans reachable within ``depth_bound`` expansions (decompositions
    plus applications) of the initial network.

    ``max_nodes`` caps the total number of expanded nodes; hitting it also
    marks the result incomplete.
    """
    protections = domain.protections if protections is None else protections
    en = _Enumerator(domain, problem, protections)
    ren = {}
    tasks = []
    for t in problem.network.tasks:
        args = []
        for a in t.args:
            if _var(a):
                ren.setdefault(a, en.fresh(a))
                a = ren[a]
            args.append(a)
        tasks.append((t.id, t.name, tuple(args)))
    root = _Node(frozenset(problem.init), tuple(tasks), frozenset(problem.network.ordering),
                 (), frozenset(), 0)
    plans, complete, expanded = set(), True, 0
    queue = deque([root])
    while queue:
        n = queue.popleft()
        if not n.tasks:
            plans.add(n.steps)
            continue
        if n.depth >= depth_bound or (max_nodes is not None and expanded >= max_nodes):
            complete = False
            continue
        expanded += 1
        queue.extend(en.children(n))
    return OracleResult(frozenset(plans), complete, expanded)
