"""Forward decomposition over explicit states with chronological backtracking.

Choice points, in the order they are tried: the frontier task (only under
``utd``/``potd``), the bindings of a primitive task's operator, the method
branches of a compound task in rank order, and the bindings of each branch.
"""
from __future__ import annotations

import logging
import sys
from typing import Iterator, Optional

from .core.errors import OrderingViolation, ProtectionViolation
from .core.model import (Action, Budget, DecompositionRecord, Domain, Method, Plan, Problem,
                         TaskInstance, TaskNetwork, id_key)
from .core.ops import Fresh, applicable, decompose_state_detailed, satisfying_bindings
from .core.state import State
from .core.terms import ground_all, is_ground, is_var, subst_terms
from .result import BudgetExhausted, SearchResult, SearchStats, Status

log = logging.getLogger(__name__)

STYLES = ("totd", "utd", "potd")


def frontier_tasks(tn: TaskNetwork, style: str = "utd") -> list:
    """Tasks without a predecessor, in id order.

    Under ``totd`` the frontier must be a single task.
    """
    if style not in STYLES:
        raise ValueError(f"unknown decomposition style {style!r}")
    tasks = sorted(tn.minimal(), key=lambda t: id_key(t.id))
    if style == "totd" and len(tasks) > 1:
        raise OrderingViolation(
            "totally ordered decomposition met unordered tasks: " + ", ".join(t.id for t in tasks))
    return tasks


def check_protection(action: Action, state: State, active: frozenset) -> frozenset:
    """Update the protected set for ``action`` or raise :class:`ProtectionViolation`.

    Cancellations are processed first, so an operator may release and delete
    the same fact.
    """
    current = set(active)
    for atom in action.unprotect:
        if atom in current:
            current.discard(atom)
        else:
            log.debug("%s cancels protection of %s, which is not protected", action, atom)
    for atom in action.delete:
        if atom in current and atom in state:
            raise ProtectionViolation(atom, action)
    current.update(action.protect)
    return frozenset(current)


def _head_sigma(m: Method, task: TaskInstance):
    """Bind head parameters to task arguments.

    Returns ``(sigma, outer)`` where ``outer`` binds network variables of the
    task that must equal constants in the head, or ``None`` on a clash.
    """
    sigma, outer = {}, {}
    if len(m.params) != len(task.args):
        return None
    for p, a in zip(m.params, task.args):
        a = outer.get(a, a)
        if is_var(p):
            prior = sigma.get(p)
            if prior is None or prior == a:
                sigma[p] = a
            elif is_var(prior):
                outer[prior] = a
            elif is_var(a):
                outer[a] = prior
            else:
                return None
        elif is_var(a):
            outer[a] = p
        elif a != p:
            return None
    sigma = {k: outer.get(v, v) for k, v in sigma.items()}
    return sigma, outer


class _Search:
    def __init__(self, domain: Domain, problem: Problem, budget: Budget, style: str,
                 commit: bool, protections: Optional[bool]):
        self.domain = domain
        self.problem = problem
        self.budget = budget
        self.style = style
        self.commit = commit
        self.protections = domain.protections if protections is None else protections
        self.stats = SearchStats()
        self.fresh = Fresh()

    def initial(self):
        net = self.problem.network
        ren = {v: self.fresh.var(v) for v in net.variables()}
        return State(self.problem.init), net.substitute(ren)

    def solutions(self, state, net) -> Iterator[tuple]:
        return self._node(state, net, (), (), (), {}, frozenset(), 0)

    def _node(self, state, net, steps, ids, trace, sigma, active, depth):
        st = self.stats
        st.nodes += 1
        if depth > st.max_depth:
            st.max_depth = depth
        if len(net) > self.budget.max_network_size:
            raise BudgetExhausted(f"network grew past {self.budget.max_network_size} tasks")
        if not net.tasks:
            yield steps, ids, trace, sigma
            return
        for t in frontier_tasks(net, self.style):
            if t.primitive:
                yield from self._apply(t, state, net, steps, ids, trace, sigma, active, depth)
            else:
                yield from self._decompose(t, state, net, steps, ids, trace, sigma, active, depth)
        st.backtracks += 1

    def _apply(self, t, state, net, steps, ids, trace, sigma, active, depth):
        op = self.domain.operator_map.get(t.name)
        if op is None:
            return
        template = op.instantiate(t.args)
        for b in satisfying_bindings(template.pre_pos, template.pre_neg, state):
            action = op.instantiate(subst_terms(t.args, b)) if b else template
            if not is_ground(action.step):
                log.debug("%s leaves arguments unbound; skipped", action)
                continue
            if not applicable(action, state):
                continue
            new_active = active
            if self.protections:
                try:
                    new_active = check_protection(action, state, active)
                except ProtectionViolation as exc:
                    log.debug("pruned: %s", exc)
                    continue
            self.stats.applications += 1
            rest = net.without(t.id).substitute(b)
            nsigma = {**sigma, **b} if b else sigma
            yield from self._node(state.successor(action.delete, action.add), rest,
                                  steps + (action.step,), ids + (t.id,), trace, nsigma,
                                  new_active, depth + 1)

    def _decompose(self, t, state, net, steps, ids, trace, sigma, active, depth):
        for m in self.domain.methods_for(t.name):
            head = _head_sigma(m, t)
            if head is None:
                continue
            hsigma, outer = head
            pos = ground_all(m.pre_pos, hsigma)
            neg = ground_all(m.pre_neg, hsigma)
            applied = False
            for b in satisfying_bindings(pos, neg, state, outer):
                full = dict(b)
                full.update({k: b.get(v, v) for k, v in hsigma.items()})
                if self.stats.decompositions >= self.budget.max_decompositions:
                    raise BudgetExhausted(
                        f"more than {self.budget.max_decompositions} decompositions needed")
                child, new = decompose_state_detailed(state, net, t, m, full, self.fresh)
                self.stats.decompositions += 1
                applied = True
                net_vars = {k: v for k, v in full.items() if "#" in k}
                record = DecompositionRecord(
                    t.id, t.name, subst_terms(t.args, net_vars), m.label, m.rank,
                    tuple((k, v) for k, v in full.items() if "#" not in k),
                    tuple((x.id, x.name, x.args) for x in new))
                nsigma = {**sigma, **net_vars} if net_vars else sigma
                yield from self._node(state, child, steps, ids, trace + (record,), nsigma,
                                      active, depth + 1)
            if applied and self.commit:
                return


def _finish(search: _Search, roots, found) -> Plan:
    steps, ids, trace, sigma = found
    return Plan(
        steps=steps,
        step_ids=ids,
        roots=tuple((t.id, t.name, subst_terms(t.args, sigma)) for t in roots),
        trace=tuple(r.substitute(sigma) for r in trace),
    )


def _run(domain, problem, budget, style, commit, protections, all_solutions):
    budget = budget or Budget(max_decompositions=problem.budget)
    search = _Search(domain, problem, budget, style or problem.style, commit, protections)
    state, net = search.initial()
    plans, seen = [], set()
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        for found in search.solutions(state, net):
            plan = _finish(search, net.tasks, found)
            if plan.steps in seen:
                continue
            seen.add(plan.steps)
            plans.append(plan)
            if not all_solutions:
                break
    except BudgetExhausted as exc:
        log.info("budget exhausted: %s", exc)
        return SearchResult(Status.BUDGET_EXHAUSTED, plans[0] if plans else None, search.stats,
                            tuple(plans), complete=False)
    finally:
        sys.setrecursionlimit(limit)
    if not plans:
        return SearchResult(Status.NO_SOLUTION, None, search.stats, (), complete=True)
    return SearchResult(Status.FOUND, plans[0], search.stats, tuple(plans), complete=True)


def plan_state(domain: Domain, problem: Problem, budget: Optional[Budget] = None,
               all_solutions: bool = False, style: Optional[str] = None,
               commit: bool = False, protections: Optional[bool] = None) -> SearchResult:
    """Find a plan by forward decomposition.

    ``budget`` defaults to the problem's decomposition budget. With
    ``commit=True`` the first applicable branch of a method is never
    abandoned for a later one. Protections follow the domain's requirements
    unless ``protections`` overrides them.

    In all-solutions mode ``result.plans`` holds every distinct step sequence.
    Hitting the budget gives ``BUDGET_EXHAUSTED`` even if plans were found.
    """
    return _run(domain, problem, budget, style, commit, protections, all_solutions)


def all_plans_state(domain: Domain, problem: Problem, budget: Optional[Budget] = None,
                    style: Optional[str] = None) -> SearchResult:
    """Every distinct plan; ``complete`` is false when the budget interrupted."""
    return _run(domain, problem, budget, style, False, None, True)
