"""Independent plan checking.

Steps are replayed from the initial state with the core ``applicable`` test.
When the plan carries a decomposition trace, the trace is checked against the
domain's method branches and its leaves against the steps. Nothing here
touches either search engine.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .core.errors import HTNError
from .core.model import PHANTOM, Domain, Plan, Problem, is_primitive
from .core.ops import applicable, missing_precondition
from .core.state import State
from .core.terms import fmt_atom, is_ground, match_args


@dataclass(frozen=True)
class Verdict:
    """``valid`` or the first failing step index with a reason.

    ``index`` is ``None`` for faults in the trace that no single step owns.
    """

    valid: bool
    index: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.valid

    def __str__(self):
        if self.valid:
            return "valid"
        where = "trace" if self.index is None else f"step {self.index}"
        return f"invalid at {where}: {self.reason}"


VALID = Verdict(True)


def Invalid(index: Optional[int], reason: str) -> Verdict:
    return Verdict(False, index, reason)


def _replay(steps, domain: Domain, s0: State):
    """First failing step of a plain replay, as ``(index, reason)`` or ``None``."""
    ops = domain.operator_map
    state = s0
    for i, step in enumerate(steps):
        op = ops.get(step[0])
        if op is None or step[0] == PHANTOM:
            return i, f"unknown operator {step[0]}"
        if len(op.params) != len(step) - 1:
            return i, f"{step[0]} takes {len(op.params)} arguments, got {len(step) - 1}"
        if not is_ground(step):
            return i, f"step {fmt_atom(step)} is not ground"
        try:
            action = op.instantiate(step[1:])
        except HTNError as exc:
            return i, str(exc)
        if not applicable(action, state):
            return i, missing_precondition(action, state)
        state = state.successor(action.delete, action.add)
    return None


class _TraceError(Exception):
    pass


def _check_tree(plan: Plan, problem: Problem, domain: Domain):
    """Check the decomposition tree; returns ``{task id: leaf ids}`` and the leaf atoms."""
    records = {}
    for r in plan.trace:
        if r.task in records:
            raise _TraceError(f"task {r.task} decomposed twice")
        records[r.task] = r
    tn0 = problem.network
    if len(plan.roots) != len(tn0.tasks):
        raise _TraceError(f"{len(plan.roots)} root tasks, problem has {len(tn0.tasks)}")
    sigma = {}
    for (rid, rname, rargs), t in zip(plan.roots, tn0.tasks):
        if rid != t.id or rname != t.name:
            raise _TraceError(f"root {rid} is ({rname}), expected {t.id} ({t.name})")
        sigma = match_args(t.args, rargs, sigma)
        if sigma is None:
            raise _TraceError(f"root {rid} arguments do not match the problem")
    leaves, below, used = {}, {}, set()

    def walk(tid, name, args):
        if tid in below:
            raise _TraceError(f"task id {tid} occurs twice")
        if is_primitive(name):
            if tid in records:
                raise _TraceError(f"primitive task {tid} has a decomposition record")
            if name != PHANTOM:
                leaves[tid] = (name,) + tuple(args)
                below[tid] = [tid]
            else:
                below[tid] = []
            return below[tid]
        rec = records.get(tid)
        if rec is None:
            raise _TraceError(f"compound task {tid} ({name}) never decomposed")
        used.add(tid)
        if rec.name != name or tuple(rec.args) != tuple(args):
            raise _TraceError(f"record for {tid} names a different task")
        m = next((m for m in domain.methods_for(name) if m.rank == rec.rank), None)
        if m is None or m.label != rec.method:
            raise _TraceError(f"{tid}: no method branch {rec.method}")
        theta = match_args(m.params, args, dict(rec.bindings))
        if theta is None:
            raise _TraceError(f"{tid}: {rec.method} does not match ({name} ...)")
        kids = list(rec.children)
        mtasks = list(m.network.tasks)
        if not mtasks:
            if kids and not (len(kids) == 1 and kids[0][1] == PHANTOM):
                raise _TraceError(f"{tid}: {rec.method} has an empty network")
        elif len(kids) != len(mtasks):
            raise _TraceError(f"{tid}: {len(kids)} children, {rec.method} has {len(mtasks)}")
        else:
            for mt, (cid, cname, cargs) in zip(mtasks, kids):
                if mt.name != cname:
                    raise _TraceError(f"{tid}: child {cid} is {cname}, branch expects {mt.name}")
                theta = match_args(mt.args, cargs, theta)
                if theta is None:
                    raise _TraceError(f"{tid}: child {cid} arguments do not fit {rec.method}")
        out = []
        for child in kids:
            out.extend(walk(*child))
        below[tid] = out
        if mtasks:
            local = {mt.id: kid[0] for mt, kid in zip(mtasks, kids)}
            order.append([(local[a], local[b]) for a, b in m.network.ordering])
        return out

    order = [list(tn0.ordering)]
    for root in plan.roots:
        walk(*root)
    stray = set(records) - used
    if stray:
        raise _TraceError(f"records for unknown tasks {', '.join(sorted(stray))}")
    return below, leaves, [e for group in order for e in group]


def validate_plan(plan: Plan, problem: Problem, domain: Domain) -> Verdict:
    """Check that ``plan`` executes from the initial state and, if it carries a
    trace, that the trace is a decomposition of the initial network yielding
    exactly these steps in an allowed order."""
    s0 = State(problem.init)
    steps = tuple(tuple(s) for s in plan.steps)
    fails = []
    bad = _replay(steps, domain, s0)
    if bad is not None:
        fails.append(bad)
    if not plan.roots and not plan.trace:
        if plan.step_ids:
            return Invalid(None, "step ids without a decomposition trace")
        if not problem.network.tasks and steps:
            return Invalid(0, "the initial network is empty")
        return Invalid(*bad) if bad else VALID
    try:
        below, leaves, ordering = _check_tree(plan, problem, domain)
    except _TraceError as exc:
        return Invalid(*bad) if bad else Invalid(None, str(exc))
    ids = tuple(plan.step_ids)
    if len(set(ids)) != len(ids) or set(ids) != set(leaves):
        return Invalid(*bad) if bad else Invalid(None, "step ids do not match the trace leaves")
    for i in range(max(len(steps), len(ids))):
        if i >= len(steps):
            fails.append((len(steps), f"plan ends before task {ids[i]} {fmt_atom(leaves[ids[i]])}"))
            break
        if i >= len(ids):
            fails.append((i, f"step {fmt_atom(steps[i])} is not in the trace"))
            break
        if steps[i] != leaves[ids[i]]:
            fails.append((i, f"step {fmt_atom(steps[i])} does not match task {ids[i]} "
                             f"{fmt_atom(leaves[ids[i]])}"))
            break
    pos = {tid: i for i, tid in enumerate(ids)}
    for a, b in ordering:
        la, lb = below.get(a, ()), below.get(b, ())
        if not la or not lb:
            continue
        last_a = max(pos[x] for x in la)
        early = [pos[y] for y in lb if pos[y] < last_a]
        if early:
            fails.append((min(early), f"task {b} must come after {a}"))
    if not fails:
        return VALID
    index, reason = min(fails, key=lambda f: f[0])
    return Invalid(index, reason)
