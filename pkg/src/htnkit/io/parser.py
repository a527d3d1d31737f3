"""Reader for ``.htd`` domain files and ``.htp`` problem files.

Domain grammar::

    (define (domain NAME)
      [(:requirements :protections)]
      (:predicates (p ?a ...) ...)
      (:operator (!name ?v ...) (:pre LIT ...) (:del ATOM ...) (:add ATOM ...)
                 [(:protect ATOM ...)] [(:unprotect ATOM ...)] [(:resources ?v ...)])
      (:method (name ?v ...) (:branch RANK (:pre LIT ...) NETWORK) ...))

    NETWORK = (:network (:tasks (ID (name term ...)) ...) (:order (ID ID) ...)
                        (:before ATOM ID) (:after ID ATOM) (:between ID ATOM ID)
                        (:bind (= term term) (!= term term) ...))
    LIT     = ATOM | (not ATOM)

Problem grammar::

    (define (problem NAME) (:domain NAME) [(:resources obj ...)] (:init ATOM ...)
      NETWORK [(:engine state|plan)] [(:style totd|utd|potd)] [(:budget N)])

Symbols are case-insensitive. Variables start with ``?``, primitive task names
with ``!``.
"""
from __future__ import annotations

from typing import Optional

from ..core.model import (Binding, Domain, Method, Operator, Problem, StateConstraint,
                          TaskInstance, TaskNetwork, is_primitive)
from ..core.terms import fmt_atom, is_var, vars_of
from .sexpr import ParseError, ParseErrors, SList, Sym, read

ENGINES = ("state", "plan")
STYLES = ("totd", "utd", "potd")
DEFAULT_BUDGET = 100000

_CONSTRAINT_SHAPES = {":before": "(:before ATOM ID)", ":after": "(:after ID ATOM)",
                      ":between": "(:between ID ATOM ID)"}


class _Reader:
    def __init__(self):
        self.errors = []

    def fail(self, node, message):
        self.errors.append(ParseError(message, node.span))
        return None

    def finish(self):
        if self.errors:
            raise ParseErrors(self.errors)

    def as_list(self, node, what):
        if not isinstance(node, SList):
            return self.fail(node, f"expected {what}")
        return node

    def as_sym(self, node, what):
        if not isinstance(node, Sym):
            return self.fail(node, f"expected {what}")
        return node.text

    def term(self, node):
        text = self.as_sym(node, "a term")
        if text is not None and text == "?":
            return self.fail(node, "empty variable name")
        return text

    def atom(self, node, arity=None):
        node = self.as_list(node, "an atom")
        if node is None:
            return None
        if not node.items:
            return self.fail(node, "empty atom")
        name = self.as_sym(node.items[0], "a predicate name")
        if name is None:
            return None
        if name.startswith("?") or name.startswith(":"):
            return self.fail(node.items[0], f"invalid predicate name {name}")
        args = [self.term(x) for x in node.items[1:]]
        if any(a is None for a in args):
            return None
        if arity is not None:
            if name not in arity:
                return self.fail(node, f"unknown predicate {name}")
            if arity[name] != len(args):
                return self.fail(node, f"predicate {name} takes {arity[name]} arguments, got {len(args)}")
        return (name,) + tuple(args)

    def literals(self, nodes, arity):
        pos, neg = [], []
        for node in nodes:
            if isinstance(node, SList) and node.head() == "not":
                if len(node.items) != 2:
                    self.fail(node, "(not ATOM) takes exactly one atom")
                    continue
                a = self.atom(node.items[1], arity)
                if a is not None:
                    neg.append(a)
            else:
                a = self.atom(node, arity)
                if a is not None:
                    pos.append(a)
        return tuple(pos), tuple(neg)

    def head(self, node, what):
        node = self.as_list(node, what)
        if node is None or not node.items:
            return self.fail(node, f"expected {what}") if node is not None else None
        name = self.as_sym(node.items[0], "a task name")
        params = [self.term(x) for x in node.items[1:]]
        if name is None or any(p is None for p in params):
            return None
        return name, tuple(params)

    def sections(self, forms):
        """Yield ``(keyword, node)`` for keyword sections, reporting anything else."""
        for node in forms:
            if not isinstance(node, SList) or node.head() is None or not node.head().startswith(":"):
                self.fail(node, "expected a (:keyword ...) section")
                continue
            yield node.head(), node

    def network(self, node, arity, refs):
        """Parse a (:network ...) form. ``refs`` collects (name, arity, node) task uses."""
        tasks, order, bindings, constraints = [], set(), [], []
        ids = {}
        pending = []
        for kw, sec in self.sections(node.items[1:]):
            if kw == ":tasks":
                for entry in sec.items[1:]:
                    entry = self.as_list(entry, "(ID (name args...))")
                    if entry is None:
                        continue
                    if len(entry.items) != 2:
                        self.fail(entry, "a task entry is (ID (name args...))")
                        continue
                    tid = self.as_sym(entry.items[0], "a task id")
                    head = self.head(entry.items[1], "a task (name args...)")
                    if tid is None or head is None:
                        continue
                    if is_var(tid):
                        self.fail(entry.items[0], "task ids cannot be variables")
                        continue
                    if tid in ids:
                        self.fail(entry.items[0], f"duplicate task id {tid}")
                        continue
                    ids[tid] = entry
                    refs.append((head[0], len(head[1]), entry.items[1]))
                    tasks.append(TaskInstance(tid, head[0], head[1]))
            elif kw == ":order":
                for pair in sec.items[1:]:
                    pair = self.as_list(pair, "(ID ID)")
                    if pair is None:
                        continue
                    if len(pair.items) != 2:
                        self.fail(pair, "an ordering entry is (ID ID)")
                        continue
                    a, b = (self.as_sym(x, "a task id") for x in pair.items)
                    if a is None or b is None:
                        continue
                    if a == b:
                        self.fail(pair, f"task {a} cannot precede itself")
                        continue
                    pending.append((pair, a, b))
                    order.add((a, b))
            elif kw in (":before", ":after", ":between"):
                expected = _CONSTRAINT_SHAPES[kw]
                if len(sec.items) != len(expected.split()):
                    self.fail(sec, f"expected {expected}")
                    continue
                if kw == ":before":
                    atom = self.atom(sec.items[1], arity)
                    first = self.as_sym(sec.items[2], "a task id")
                    c = StateConstraint("before", atom, first) if atom and first else None
                    mentioned = [(sec.items[2], first)]
                elif kw == ":after":
                    first = self.as_sym(sec.items[1], "a task id")
                    atom = self.atom(sec.items[2], arity)
                    c = StateConstraint("after", atom, first) if atom and first else None
                    mentioned = [(sec.items[1], first)]
                else:
                    first = self.as_sym(sec.items[1], "a task id")
                    atom = self.atom(sec.items[2], arity)
                    second = self.as_sym(sec.items[3], "a task id")
                    c = StateConstraint("between", atom, first, second) if atom and first and second else None
                    mentioned = [(sec.items[1], first), (sec.items[3], second)]
                if c is not None:
                    pending.extend((n, t, None) for n, t in mentioned)
                    constraints.append(c)
            elif kw == ":bind":
                for entry in sec.items[1:]:
                    entry = self.as_list(entry, "(= a b) or (!= a b)")
                    if entry is None:
                        continue
                    if len(entry.items) != 3 or entry.head() not in ("=", "!="):
                        self.fail(entry, "a binding is (= a b) or (!= a b)")
                        continue
                    left = self.term(entry.items[1])
                    right = self.term(entry.items[2])
                    if left is None or right is None:
                        continue
                    if not is_var(left) and not is_var(right):
                        self.fail(entry, "a binding must mention a variable")
                        continue
                    if not is_var(left):
                        left, right = right, left
                    bindings.append(Binding(left, right, entry.head() == "="))
            else:
                self.fail(sec, f"unknown network section {kw}")
        for where, a, b in pending:
            for tid in (a, b):
                if tid is not None and tid not in ids:
                    self.fail(where, f"unknown task id {tid}")
        known = [(a, b) for _, a, b in pending if b is not None and a in ids and b in ids]
        net = None
        try:
            net = TaskNetwork(tuple(tasks), frozenset(known), tuple(bindings),
                              tuple(c for c in constraints
                                    if all(t in ids for t in c.tasks())))
            if not net.is_acyclic():
                self.fail(node, "task ordering contains a cycle")
        except ValueError as exc:
            self.fail(node, str(exc))
        return net


def _check_refs(r, refs, operators, heads):
    for name, n, node in refs:
        if is_primitive(name):
            op = operators.get(name)
            if op is None:
                r.fail(node, f"unknown primitive task {name}")
            elif len(op.params) != n:
                r.fail(node, f"{name} takes {len(op.params)} arguments, got {n}")
        else:
            if name not in heads:
                r.fail(node, f"unknown compound task {name}")
            elif n not in heads[name]:
                r.fail(node, f"{name} takes {sorted(heads[name])[0]} arguments, got {n}")


def _define_header(r, forms, kind):
    if len(forms) != 1:
        node = forms[1] if len(forms) > 1 else None
        if node is None:
            raise ParseErrors([ParseError("empty input", _empty_span(r))])
        r.fail(node, "expected a single (define ...) form")
        r.finish()
    top = r.as_list(forms[0], "(define ...)")
    if top is None or top.head() != "define" or len(top.items) < 2:
        r.fail(forms[0], "expected (define ...)")
        r.finish()
    hdr = r.as_list(top.items[1], f"({kind} NAME)")
    if hdr is None or hdr.head() != kind or len(hdr.items) != 2 or not isinstance(hdr.items[1], Sym):
        r.fail(top.items[1], f"expected ({kind} NAME)")
        r.finish()
    return hdr.items[1].text, top.items[2:]


def _empty_span(r):
    from ..core.model import SourceSpan
    return SourceSpan(getattr(r, "filename", "<input>"), 1, 1, 1)


def parse_domain(text: str, filename: str = "<domain>") -> Domain:
    r = _Reader()
    r.filename = filename
    forms = read(text, filename)
    if not forms:
        raise ParseErrors([ParseError("empty input", _empty_span(r))])
    name, body = _define_header(r, forms, "domain")

    protections = False
    arity = {}
    predicates = []
    op_nodes, method_nodes = [], []
    for kw, sec in r.sections(body):
        if kw == ":requirements":
            for item in sec.items[1:]:
                if isinstance(item, Sym) and item.text == ":protections":
                    protections = True
                else:
                    r.fail(item, "unknown requirement")
        elif kw == ":predicates":
            for p in sec.items[1:]:
                head = r.head(p, "a predicate (name ?args...)")
                if head is None:
                    continue
                if head[0] in arity:
                    r.fail(p, f"predicate {head[0]} declared twice")
                    continue
                if not all(is_var(a) for a in head[1]):
                    r.fail(p, "predicate declarations take variables")
                    continue
                arity[head[0]] = len(head[1])
                predicates.append((head[0], len(head[1])))
        elif kw == ":operator":
            op_nodes.append(sec)
        elif kw == ":method":
            method_nodes.append(sec)
        else:
            r.fail(sec, f"unknown domain section {kw}")

    operators = {}
    for sec in op_nodes:
        op = _operator(r, sec, arity)
        if op is None:
            continue
        if op.name in operators:
            r.fail(sec, f"operator {op.name} defined twice")
            continue
        operators[op.name] = op

    heads = {}
    for sec in method_nodes:
        head = r.head(sec.items[1], "a method head") if len(sec.items) > 1 else r.fail(sec, "method without head")
        if head is not None:
            heads.setdefault(head[0], set()).add(len(head[1]))

    refs = []
    methods, ranks, first_seen, where = [], {}, {}, {}
    for sec in method_nodes:
        for m, node in _method(r, sec, arity, refs):
            if m.name in ranks and m.rank in ranks[m.name]:
                r.fail(node, f"branch rank {m.rank} repeated for {m.name}")
                continue
            ranks.setdefault(m.name, set()).add(m.rank)
            first_seen.setdefault(m.name, len(first_seen))
            where.setdefault(m.name, {})[m.rank] = node
            methods.append(m)
    for head, rs in ranks.items():
        k = len(rs)
        for rank in sorted(rs):
            if rank > k:
                r.fail(where[head][rank].items[1], f"branch ranks of {head} must be 1..{k}")
                break
    _check_refs(r, refs, operators, heads)
    r.finish()
    methods.sort(key=lambda m: (first_seen[m.name], m.rank))
    return Domain(name, tuple(predicates), tuple(operators.values()), tuple(methods), protections)


def _symbols(nodes):
    """Every symbol inside ``nodes``, depth first."""
    for node in nodes:
        if isinstance(node, Sym):
            yield node
        elif isinstance(node, SList):
            yield from _symbols(node.items)


def _operator(r, sec, arity):
    if len(sec.items) < 2:
        return r.fail(sec, "operator without head")
    head = r.head(sec.items[1], "an operator head (!name ?v...)")
    if head is None:
        return None
    name, params = head
    ok = True
    if not is_primitive(name):
        r.fail(sec.items[1].items[0], f"operator name {name} must start with '!'")
        ok = False
    if not all(is_var(p) for p in params):
        r.fail(sec.items[1], "operator parameters must be variables")
        ok = False
    if len(set(params)) != len(params):
        r.fail(sec.items[1], "operator parameters must be distinct")
        ok = False
    parts = {":pre": ((), ()), ":del": (), ":add": (), ":protect": (), ":unprotect": (), ":resources": ()}
    seen = set()
    for kw, part in r.sections(sec.items[2:]):
        if kw not in parts:
            r.fail(part, f"unknown operator section {kw}")
            continue
        if kw in seen:
            r.fail(part, f"section {kw} repeated")
            continue
        seen.add(kw)
        if kw == ":pre":
            parts[kw] = r.literals(part.items[1:], arity)
        elif kw == ":resources":
            res = []
            for item in part.items[1:]:
                t = r.term(item)
                if t is not None and t not in params:
                    r.fail(item, f"resource {t} is not a parameter")
                elif t is not None:
                    res.append(t)
            parts[kw] = tuple(res)
        else:
            atoms = []
            for item in part.items[1:]:
                a = r.atom(item, arity)
                if a is not None:
                    atoms.append(a)
            parts[kw] = tuple(atoms)
    pos, neg = parts[":pre"]
    checked = [n for n in sec.items[2:] if not (isinstance(n, SList) and n.head() == ":resources")]
    for sym in _symbols(checked):
        if is_var(sym.text) and sym.text not in params:
            r.fail(sym, f"variable {sym.text} of {name} is not a parameter")
            ok = False
    overlap = set(parts[":del"]) & set(parts[":add"])
    if overlap:
        where = next(p for kw, p in r.sections(sec.items[2:]) if kw == ":add")
        r.fail(where, f"{name} both adds and deletes "
                      f"{' '.join(fmt_atom(a) for a in sorted(overlap))}")
        ok = False
    if not ok:
        return None
    return Operator(name, params, pos, neg, parts[":del"], parts[":add"],
                    parts[":protect"], parts[":unprotect"], parts[":resources"], span=sec.span)


def _method(r, sec, arity, refs):
    head = r.head(sec.items[1], "a method head")
    if head is None:
        return []
    name, params = head
    if is_primitive(name):
        r.fail(sec.items[1], f"compound task name {name} must not start with '!'")
        return []
    out = []
    for kw, br in r.sections(sec.items[2:]):
        if kw != ":branch":
            r.fail(br, f"expected (:branch RANK ...), got {kw}")
            continue
        if len(br.items) < 2 or not isinstance(br.items[1], Sym) or not br.items[1].text.isdigit():
            r.fail(br, "a branch starts with a positive integer rank")
            continue
        rank = int(br.items[1].text)
        if rank < 1:
            r.fail(br.items[1], "branch ranks start at 1")
            continue
        pos, neg = (), ()
        net = TaskNetwork()
        for bkw, part in r.sections(br.items[2:]):
            if bkw == ":pre":
                pos, neg = r.literals(part.items[1:], arity)
            elif bkw == ":network":
                parsed = r.network(part, arity, refs)
                if parsed is not None:
                    net = parsed
            else:
                r.fail(part, f"unknown branch section {bkw}")
        bound = set(params) | set(vars_of(pos))
        loose = [v for v in vars_of(neg) if v not in bound]
        if loose:
            at = next((y for y in _symbols(br.items[2:]) if y.text == loose[0]), br)
            r.fail(at, f"unsafe negation: {', '.join(loose)} occur only in negative conditions")
            continue
        out.append((Method(name, params, rank, pos, neg, net, span=br.span), br))
    return out


def parse_problem(text: str, domain: Optional[Domain] = None, filename: str = "<problem>") -> Problem:
    """Parse a problem; with ``domain`` given, names and arities are checked too."""
    r = _Reader()
    r.filename = filename
    forms = read(text, filename)
    if not forms:
        raise ParseErrors([ParseError("empty input", _empty_span(r))])
    name, body = _define_header(r, forms, "problem")
    arity = domain.arity if domain is not None else None
    domain_name = ""
    init, resources = [], []
    net = TaskNetwork()
    engine, style, budget = "state", "totd", DEFAULT_BUDGET
    refs = []
    for kw, sec in r.sections(body):
        if kw == ":domain":
            if len(sec.items) != 2 or not isinstance(sec.items[1], Sym):
                r.fail(sec, "expected (:domain NAME)")
                continue
            domain_name = sec.items[1].text
            if domain is not None and domain_name != domain.name:
                r.fail(sec.items[1], f"problem is for domain {domain_name}, not {domain.name}")
        elif kw == ":init":
            for item in sec.items[1:]:
                a = r.atom(item, arity)
                if a is None:
                    continue
                if any(is_var(x) for x in a[1:]):
                    r.fail(item, "initial state facts must be ground")
                    continue
                init.append(a)
        elif kw == ":resources":
            for item in sec.items[1:]:
                t = r.term(item)
                if t is not None:
                    resources.append(t)
        elif kw == ":network":
            parsed = r.network(sec, arity, refs)
            if parsed is not None:
                net = parsed
        elif kw in (":engine", ":style", ":budget"):
            if len(sec.items) != 2 or not isinstance(sec.items[1], Sym):
                r.fail(sec, f"expected ({kw} VALUE)")
                continue
            value = sec.items[1].text
            if kw == ":engine":
                if value not in ENGINES:
                    r.fail(sec.items[1], f"engine must be one of {', '.join(ENGINES)}")
                engine = value
            elif kw == ":style":
                if value not in STYLES:
                    r.fail(sec.items[1], f"style must be one of {', '.join(STYLES)}")
                style = value
            else:
                if not value.isdigit() or int(value) < 1:
                    r.fail(sec.items[1], "budget must be a positive integer")
                else:
                    budget = int(value)
        else:
            r.fail(sec, f"unknown problem section {kw}")
    if domain is not None:
        heads = {}
        for m in domain.methods:
            heads.setdefault(m.name, set()).add(len(m.params))
        _check_refs(r, refs, domain.operator_map, heads)
    r.finish()
    return Problem(name, domain_name, tuple(dict.fromkeys(init)), net, engine, style, budget,
                   tuple(resources))
