"""Depth-first plan-space refinement.

Every node is handled by the first step that applies: propagate and
simplify its constraints, resolve the first threat against a causal link,
establish the first ready precondition, or decompose the leftmost compound
task. A node with only primitive tasks and nothing left to do has its free
variables grounded and is then linearised.
"""
from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from typing import Iterator, Optional

from ..core.errors import (DomainError, Inconsistent, LabelMismatch, Pruned, UnificationFailure,
                           UnsafeNegation)
from ..core.model import (PHANTOM, Binding, Budget, DecompositionRecord, Domain, Method, Plan,
                          Problem, StateConstraint, TaskInstance, TaskNetwork)
from ..core.ops import Fresh, decompose_po_detailed, satisfying_bindings
from ..core.state import State
from ..core.terms import ground, ground_all, is_var, match_args
from ..result import BudgetExhausted, SearchResult, SearchStats, Status
from .constraints import propagate, simplify
from .interactions import detect_interactions, establish, resolve_threat
from .linearise import linearise
from .node import RefinementNode

log = logging.getLogger(__name__)

_PHANTOM_ID = "phantom"


@dataclass(frozen=True)
class SolutionNetwork:
    """A primitive, ground network together with the linearisation that executes it."""

    network: TaskNetwork
    links: tuple
    order: tuple
    plan: Plan
    log: tuple = ()


def precondition_constraints(tasks, domain: Domain) -> list:
    """``before`` obligations for the positive preconditions of primitive tasks."""
    out = []
    ops = domain.operator_map
    for t in tasks:
        if t.primitive:
            act = ops[t.name].instantiate(t.args)
            out.extend(StateConstraint("before", p, t.id) for p in act.pre_pos)
    return out


def _with_conditions(m: Method, local: dict, dynamic: list) -> Method:
    """``m`` with ``local`` applied and its state-dependent conditions turned
    into ``before`` constraints on the first tasks of its network.

    An empty network gets a phantom no-op task to carry them.
    """
    net = m.network.substitute(local)
    if not net.tasks:
        net = TaskNetwork((TaskInstance(_PHANTOM_ID, PHANTOM, ()),))
    firsts = [t.id for t in net.minimal()]
    extra = [StateConstraint("before", ground(a, local), f) for a in dynamic for f in firsts]
    net = TaskNetwork(net.tasks, net.ordering, net.bindings,
                      tuple(dict.fromkeys(net.constraints + tuple(extra))))
    return Method(m.name, m.params, m.rank, (), (), net, m.span)


class _Refiner:
    def __init__(self, domain: Domain, problem: Problem, budget: Budget):
        self.domain = domain
        self.problem = problem
        self.budget = budget
        self.s0 = State(problem.init)
        self.stats = SearchStats()
        self.fresh = Fresh()
        self.static = domain.static_predicates
        self.constants = list(dict.fromkeys(
            [a for f in self.s0 for a in f[1:]]
            + [a for t in problem.network.tasks for a in t.args if not is_var(a)]))

    def root(self) -> RefinementNode:
        net = self.problem.network
        ren = {v: self.fresh.var(v) for v in net.variables()}
        net = net.substitute(ren)
        pre = precondition_constraints(net.tasks, self.domain)
        net = TaskNetwork(net.tasks, net.ordering, net.bindings,
                          tuple(dict.fromkeys(net.constraints + tuple(pre))))
        return RefinementNode(net, roots=tuple((t.id, t.name, t.args) for t in net.tasks))

    def solutions(self, n: RefinementNode) -> Iterator[SolutionNetwork]:
        st = self.stats
        st.nodes += 1
        st.max_depth = max(st.max_depth, n.depth)
        if len(n.network) > self.budget.max_network_size:
            raise BudgetExhausted(f"network grew past {self.budget.max_network_size} tasks")
        try:
            n = simplify(propagate(n), self.s0, self.domain)
        except (Inconsistent, Pruned) as exc:
            log.debug("pruned at depth %d: %s", n.depth, exc)
            st.backtracks += 1
            return
        threats = [t for t in detect_interactions(n, self.s0, self.domain, established_only=True)
                   if t.kind != "resource"]
        if threats:
            children = resolve_threat(n, threats[0], self.domain)
        else:
            ready = [c for c in n.agenda if n.ready(c)]
            compound = next((t for t in n.network.tasks if not t.primitive), None)
            if ready:
                children = establish(ready[0], n, self.s0, self.domain)
            elif compound is not None:
                children = self._decompositions(n, compound)
            else:
                yield from self._finish(n)
                return
        empty = True
        for child in children:
            empty = False
            yield from self.solutions(child)
        if empty:
            st.backtracks += 1

    def _decompositions(self, n: RefinementNode, t: TaskInstance) -> Iterator[RefinementNode]:
        for m in self.domain.methods_for(t.name):
            if len(m.params) != len(t.args):
                continue
            head = {}
            for p, a in zip(m.params, t.args):
                if is_var(p):
                    head.setdefault(p, a)
            stat_pos = ground_all([a for a in m.pre_pos if a[0] in self.static], head)
            stat_neg = ground_all([a for a in m.pre_neg if a[0] in self.static], head)
            dynamic = [a for a in m.pre_pos if a[0] not in self.static]
            if any(a[0] not in self.static for a in m.pre_neg):
                raise DomainError(f"{m.label}: negative conditions on changing facts are not "
                                  "supported by plan-space refinement")
            try:
                bindings = list(satisfying_bindings(stat_pos, stat_neg, self.s0))
            except UnsafeNegation as exc:
                raise DomainError(f"{m.label}: {exc}") from None
            for b in bindings:
                child = self._decompose(n, t, m, b, dynamic)
                if child is not None:
                    yield child

    def _decompose(self, n, t, m, b, dynamic) -> Optional[RefinementNode]:
        outer = [Binding(k, v) for k, v in b.items() if "#" in k]
        local = {k: v for k, v in b.items() if "#" not in k}
        m2 = _with_conditions(m, local, dynamic)
        if self.stats.decompositions >= self.budget.max_decompositions:
            raise BudgetExhausted(f"more than {self.budget.max_decompositions} decompositions needed")
        try:
            net, new = decompose_po_detailed(n.network, t.id, m2, self.fresh)
        except (LabelMismatch, UnificationFailure):
            return None
        self.stats.decompositions += 1
        pre = precondition_constraints(new, self.domain)
        net = TaskNetwork(net.tasks, net.ordering, tuple(dict.fromkeys(net.bindings + tuple(outer))),
                          tuple(dict.fromkeys(net.constraints + tuple(pre))))
        sigma = {p: a for p, a in zip(m.params, t.args) if is_var(p)}
        sigma.update(local)
        for mt, nt in zip(m2.network.tasks, new):
            sigma = match_args(mt.args, nt.args, sigma) or sigma
        record = DecompositionRecord(t.id, t.name, t.args, m.label, m.rank, tuple(sigma.items()),
                                     tuple((x.id, x.name, x.args) for x in new))
        return n.with_(network=net, trace=n.trace + (record,), depth=n.depth + 1)

    def _groundings(self, n: RefinementNode) -> Iterator[RefinementNode]:
        free = n.network.variables()
        if not free:
            yield n
            return
        var = free[0]
        for c in self.constants:
            net = TaskNetwork(n.network.tasks, n.network.ordering,
                              n.network.bindings + (Binding(var, c),), n.network.constraints)
            try:
                child = propagate(n.with_(network=net))
            except Inconsistent:
                continue
            yield from self._groundings(child)

    def _finish(self, n: RefinementNode) -> Iterator[SolutionNetwork]:
        for g in self._groundings(n):
            found = linearise(g.network, self.s0, self.domain)
            if found is None:
                self.stats.backtracks += 1
                continue
            order, _ = found
            net = g.network
            steps = tuple(net.get(i).atom for i in order if net.get(i).name != PHANTOM)
            ids = tuple(i for i in order if net.get(i).name != PHANTOM)
            self.stats.applications = len(steps)
            plan = Plan(steps, ids, g.roots, g.trace)
            yield SolutionNetwork(net, g.links, order, plan, g.log)


def initial_node(domain: Domain, problem: Problem) -> RefinementNode:
    """The root of the plan space: the initial network with its primitive
    tasks' preconditions as open obligations."""
    return _Refiner(domain, problem, Budget(max_decompositions=problem.budget)).root()


def _run(domain, problem, budget, all_solutions, limit=None):
    budget = budget or Budget(max_decompositions=problem.budget)
    ref = _Refiner(domain, problem, budget)
    found, seen = [], set()
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        for sol in ref.solutions(ref.root()):
            if sol.plan.steps in seen:
                continue
            seen.add(sol.plan.steps)
            found.append(sol)
            if not all_solutions or (limit is not None and len(found) >= limit):
                break
    except BudgetExhausted as exc:
        log.info("budget exhausted: %s", exc)
        return _result(Status.BUDGET_EXHAUSTED, found, ref.stats, complete=False)
    finally:
        sys.setrecursionlimit(old)
    if not found:
        return _result(Status.NO_SOLUTION, found, ref.stats, complete=True)
    return _result(Status.FOUND, found, ref.stats, complete=limit is None or len(found) < limit)


def _result(status, found, stats, complete):
    first = found[0] if found else None
    return SearchResult(status, first.plan if first else None, stats,
                        tuple(s.plan for s in found), complete, first,
                        first.log if first else (), engine="plan")


def plan_po(domain: Domain, problem: Problem, budget: Optional[Budget] = None) -> SearchResult:
    """First solution network found by plan-space refinement.

    ``result.solution`` holds the network, its causal links and the
    witnessing order; ``result.threat_log`` the threat resolutions taken on
    the way to it.
    """
    return _run(domain, problem, budget, False)


def all_solutions_po(domain: Domain, problem: Problem, budget: Optional[Budget] = None,
                     limit: Optional[int] = None) -> SearchResult:
    """Every solution (distinct by step sequence), up to ``limit`` of them."""
    return _run(domain, problem, budget, True, limit)


def solutions_po(domain: Domain, problem: Problem, budget: Optional[Budget] = None
                 ) -> Iterator[SolutionNetwork]:
    """Lazily yield solution networks; raises ``BudgetExhausted`` when the budget runs out."""
    budget = budget or Budget(max_decompositions=problem.budget)
    ref = _Refiner(domain, problem, budget)
    return ref.solutions(ref.root())
