"""Plan output as text lines or as one JSON document, and reading plans back."""
from __future__ import annotations

import json
import re

from ..core.errors import HTNError
from ..core.model import DecompositionRecord, Plan
from ..core.terms import fmt_atom


class PlanFormatError(HTNError):
    pass


def _tree(plan: Plan) -> list:
    records = {r.task: r for r in plan.trace}
    position = {tid: i for i, tid in enumerate(plan.step_ids)}

    def node(tid, name, args):
        out = {"id": tid, "name": name, "args": list(args)}
        rec = records.get(tid)
        if rec is not None:
            out["method"] = rec.method
            out["rank"] = rec.rank
            out["bindings"] = [list(b) for b in rec.bindings]
            out["children"] = [node(*child) for child in rec.children]
        elif tid in position:
            out["step"] = position[tid]
        return out

    return [node(*root) for root in plan.roots]


def plan_document(result, problem=None, explain: bool = False) -> dict:
    """The JSON-ready description of a search result."""
    plan = result.plan
    doc = {
        "status": result.status.value,
        "engine": result.engine,
        "stats": result.stats.as_dict(),
        "steps": [fmt_atom(s) for s in plan.steps] if plan else [],
        "step_ids": list(plan.step_ids) if plan else [],
        "trace": _tree(plan) if plan else [],
        "decomposition_order": [r.task for r in plan.trace] if plan else [],
    }
    if problem is not None:
        doc["problem"] = problem.name
        doc["domain"] = problem.domain_name
    if len(result.plans) > 1 or not result.complete:
        doc["plans"] = [[fmt_atom(s) for s in p.steps] for p in result.plans]
        doc["complete"] = result.complete
    sol = result.solution
    if sol is not None:
        doc["network"] = {
            "tasks": [{"id": t.id, "name": t.name, "args": list(t.args)} for t in sol.network.tasks],
            "ordering": sorted([list(e) for e in sol.network.ordering]),
            "links": [{"producer": l.producer, "consumer": l.consumer, "atom": fmt_atom(l.atom)}
                      for l in sol.links],
            "linearisation": list(sol.order),
        }
    if explain:
        doc["threat_log"] = list(result.threat_log)
    return doc


def serialize_plan(result, fmt: str = "text", problem=None, explain: bool = False) -> str:
    """``text``: one ``k: (name args)`` line per step. ``json``: see :func:`plan_document`."""
    if fmt == "text":
        plan = result.plan
        return "".join(line + "\n" for line in plan.lines()) if plan else ""
    if fmt == "json":
        return json.dumps(plan_document(result, problem, explain), sort_keys=True, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def explain_text(result) -> str:
    """Human-readable trace, threat log and statistics."""
    lines = []
    plan = result.plan
    if plan is not None:
        def walk(node, depth):
            atom = fmt_atom((node["name"],) + tuple(node["args"]))
            pad = "  " * depth
            if "method" in node:
                lines.append(f"{pad}{node['id']}: {atom} via {node['method']}")
                for child in node["children"]:
                    walk(child, depth + 1)
            elif "step" in node:
                lines.append(f"{pad}{node['id']}: {atom} = step {node['step']}")
            else:
                lines.append(f"{pad}{node['id']}: {atom}")
        for root in _tree(plan):
            walk(root, 0)
    for entry in result.threat_log:
        lines.append(f"threat: {entry}")
    stats = result.stats.as_dict()
    lines.append("stats: " + " ".join(f"{k}={v}" for k, v in stats.items()))
    return "\n".join(lines) + "\n"


_LINE = re.compile(r"^\s*(\d+)\s*:\s*\((.*)\)\s*$")


def _parse_atom(text: str) -> tuple:
    inner = text.strip()
    if inner.startswith("(") and inner.endswith(")"):
        inner = inner[1:-1]
    parts = inner.lower().split()
    if not parts:
        raise PlanFormatError(f"empty step {text!r}")
    return tuple(parts)


def read_plan(text: str) -> Plan:
    """Read a plan written by :func:`serialize_plan` in either format.

    Text plans carry no trace, so only their steps can be checked.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise PlanFormatError(f"line {exc.lineno}: {exc.msg}") from None
        return _plan_from_doc(doc)
    steps = []
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith(";"):
            continue
        m = _LINE.match(line)
        if m is None:
            raise PlanFormatError(f"line {n}: expected 'k: (name args...)'")
        if int(m.group(1)) != len(steps):
            raise PlanFormatError(f"line {n}: step number {m.group(1)}, expected {len(steps)}")
        steps.append(_parse_atom(m.group(2)))
    return Plan(tuple(steps))


def _plan_from_doc(doc: dict) -> Plan:
    try:
        steps = tuple(_parse_atom(s) for s in doc.get("steps", []))
        ids = tuple(doc.get("step_ids", ()))
        records = {}

        def visit(node):
            entry = (node["id"], node["name"], tuple(node["args"]))
            if "method" in node:
                kids = [visit(c) for c in node["children"]]
                records[node["id"]] = DecompositionRecord(
                    node["id"], node["name"], tuple(node["args"]), node["method"],
                    int(node["rank"]), tuple(tuple(b) for b in node["bindings"]), tuple(kids))
            return entry

        roots = tuple(visit(n) for n in doc.get("trace", []))
        order = doc.get("decomposition_order") or list(records)
        trace = tuple(records.pop(tid) for tid in order if tid in records) + tuple(records.values())
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise PlanFormatError(f"malformed plan document: {exc}") from None
    return Plan(steps, ids, roots, trace)


__all__ = ["serialize_plan", "plan_document", "explain_text", "read_plan", "PlanFormatError"]
