import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from htnkit.core import (Binding, Domain, Method, Operator, StateConstraint, TaskInstance,
                         TaskNetwork)
from htnkit.generate import gen_logistics
from htnkit.io import ParseErrors, parse_domain, parse_problem, print_domain, print_problem

from .conftest import FIXTURES, load

DOMAINS = sorted(p.name for p in FIXTURES.iterdir() if p.name.endswith(".htd"))
PROBLEMS = {
    "logistics.htd": ["fig1.htp", "fig1-plan.htp", "deliver-l4.htp", "two-trucks.htp",
                      "no-plane.htp", "return-trip.htp"],
    "logistics-protect.htd": ["fig1-protect.htp"],
    "fig3.htd": ["fig3a.htp", "fig3b.htp", "fig4.htp"],
    "blocks.htd": ["stack2.htp", "sussman.htp"],
}


def test_every_fixture_problem_is_listed():
    listed = {p for ps in PROBLEMS.values() for p in ps}
    assert listed == {p.name for p in FIXTURES.iterdir() if p.name.endswith(".htp")}
    assert sorted(PROBLEMS) == DOMAINS


@pytest.mark.parametrize("name", DOMAINS)
def test_domain_round_trip(name):
    d = load(name)
    text = print_domain(d)
    again = parse_domain(text)
    assert again == d
    assert print_domain(again) == text


@pytest.mark.parametrize("dom,prob", [(d, p) for d, ps in PROBLEMS.items() for p in ps])
def test_problem_round_trip(dom, prob):
    d, p = load(dom, prob)
    text = print_problem(p)
    again = parse_problem(text, d)
    assert again == p
    assert print_problem(again) == text


def test_generated_problem_round_trip():
    dt, pt = gen_logistics(3, 2, 3, 11)
    d = parse_domain(dt)
    assert print_problem(parse_problem(pt, d)) == pt


def test_empty_domain_is_byte_stable():
    text = print_domain(parse_domain("(define (domain empty))"))
    assert text == "(define (domain empty))\n"
    assert print_domain(parse_domain(text)) == text


def test_branch_order_survives_round_trip():
    d = load("logistics.htd")
    assert [m.rank for m in parse_domain(print_domain(d)).methods_for("deliver")] == [1, 2, 3, 4, 5]


def test_methods_sorted_by_head_then_rank():
    d = parse_domain("""(define (domain d)
      (:operator (!a))
      (:method (m) (:branch 2 (:network (:tasks (1 (!a))))))
      (:method (n) (:branch 1 (:network (:tasks))))
      (:method (m) (:branch 1 (:network (:tasks)))))""")
    assert [m.label for m in d.methods] == ["m#1", "m#2", "n#1"]


def test_parse_keeps_everything():
    d, p = load("logistics.htd", "fig1.htp")
    assert len(d.operators) == 6 and len(d.methods) == 5
    assert d.methods[0].label == "deliver#1"
    assert ("next-hop", 3) in d.predicates
    assert p.init[0] == ("truck-at", "t", "l1") and p.style == "totd"
    assert [t.atom for t in p.network.tasks] == [("deliver", "b", "l1", "l4")]


D = "(define (domain d)\n  (:predicates (p ?x))\n"
OP = "  (:operator (!a ?x) (:add (p ?x)))\n"

MALFORMED = [
    ("unclosed", D.rstrip("\n"), "x.htd:1:1", "unclosed '('"),
    ("stray close", "(define (domain d))\n)", "x.htd:2:1", "unexpected ')'"),
    ("operator namespace", D + "  (:operator (move ?x) (:add (p ?x))))", "x.htd:3:15",
     "operator name move must start with '!'"),
    ("unknown predicate", D + "  (:operator (!a ?x) (:pre (q ?x))))", "x.htd:3:28",
     "unknown predicate q"),
    ("arity", D + "  (:operator (!a ?x) (:add (p ?x ?x))))", "x.htd:3:28",
     "predicate p takes 1 arguments, got 2"),
    ("free operator variable", D + "  (:operator (!a ?x) (:pre (not (p ?y)))))", "x.htd:3:36",
     "variable ?y of !a is not a parameter"),
    ("add and delete", D + "  (:operator (!a ?x) (:del (p ?x)) (:add (p ?x))))", "x.htd:3:36",
     "!a both adds and deletes (p ?x)"),
    ("rank gap", D + OP + "  (:method (m ?x)\n    (:branch 1 (:network (:tasks)))\n"
     "    (:branch 3 (:network (:tasks)))))", "x.htd:6:14", "branch ranks of m must be 1..2"),
    ("unsafe negation", D + "  (:method (m ?x)\n    (:branch 1 (:pre (not (p ?z))) "
     "(:network (:tasks)))))", "x.htd:4:30",
     "unsafe negation: ?z occur only in negative conditions"),
    ("cycle", D + OP + "  (:method (m ?x)\n    (:branch 1 (:network (:tasks (1 (!a ?x)) "
     "(2 (!a ?x))) (:order (1 2) (2 1))))))", "x.htd:5:16", "task ordering contains a cycle"),
    ("unknown task", D + "  (:method (m ?x)\n    (:branch 1 (:network (:tasks (1 (!zap ?x)))))))",
     "x.htd:4:37", "unknown primitive task !zap"),
    ("unknown id", D + OP + "  (:method (m ?x)\n    (:branch 1 (:network (:tasks (1 (!a ?x))) "
     "(:order (1 7))))))", "x.htd:5:55", "unknown task id 7"),
]


@pytest.mark.parametrize("label,text,span,message", MALFORMED, ids=[m[0] for m in MALFORMED])
def test_malformed_domain(label, text, span, message):
    with pytest.raises(ParseErrors) as info:
        parse_domain(text, "x.htd")
    first = info.value.errors[0]
    assert (str(first.span), first.message) == (span, message)


PD = parse_domain(D + OP.rstrip("\n") + ")")
BAD_PROBLEMS = [
    ("non-ground init", "(define (problem q) (:domain d)\n  (:init (p ?x)))", "x.htp:2:10",
     "initial state facts must be ground"),
    ("wrong domain", "(define (problem q) (:domain e)\n  (:init (p a)))", "x.htp:1:30",
     "problem is for domain e, not d"),
    ("bad engine", "(define (problem q) (:domain d)\n  (:init (p a))\n  (:engine fast))",
     "x.htp:3:12", "engine must be one of state, plan"),
    ("bad budget", "(define (problem q) (:domain d)\n  (:init (p a))\n  (:budget 0))",
     "x.htp:3:12", "budget must be a positive integer"),
]


@pytest.mark.parametrize("label,text,span,message", BAD_PROBLEMS, ids=[m[0] for m in BAD_PROBLEMS])
def test_malformed_problem(label, text, span, message):
    with pytest.raises(ParseErrors) as info:
        parse_problem(text, PD, "x.htp")
    first = info.value.errors[0]
    assert (str(first.span), first.message) == (span, message)


def test_several_errors_reported_together():
    text = D + "  (:operator (!a ?x) (:pre (q ?x)))\n  (:operator (!b ?x) (:pre (r ?x))))"
    with pytest.raises(ParseErrors) as info:
        parse_domain(text, "x.htd")
    assert [str(e.span) for e in info.value.errors] == ["x.htd:3:28", "x.htd:4:28"]


# random domains --------------------------------------------------------------

CONSTS = ["k0", "k1"]


@st.composite
def domains(draw):
    preds = [(f"p{i}", draw(st.integers(0, 3))) for i in range(draw(st.integers(1, 4)))]

    def atoms(terms, n_max=3):
        if not terms:
            terms = CONSTS
        out = []
        for _ in range(draw(st.integers(0, n_max))):
            name, n = draw(st.sampled_from(preds))
            out.append((name,) + tuple(draw(st.sampled_from(terms)) for _ in range(n)))
        return tuple(out)

    ops = []
    for i in range(draw(st.integers(0, 3))):
        params = tuple(f"?v{j}" for j in range(draw(st.integers(0, 3))))
        terms = list(params) + CONSTS
        delete = tuple(dict.fromkeys(atoms(terms)))
        add = tuple(a for a in dict.fromkeys(atoms(terms)) if a not in delete)
        protect = atoms(terms, 1)
        resources = tuple(p for p in params if draw(st.booleans()))
        ops.append(Operator(f"!o{i}", params, atoms(terms), atoms(terms), delete, add,
                            protect, (), resources))
    heads = [(f"m{i}", draw(st.integers(0, 2))) for i in range(draw(st.integers(0, 3)))]
    callable_ = [(o.name, len(o.params)) for o in ops] + heads
    methods = []
    for name, n in heads:
        params = tuple(f"?h{j}" for j in range(n))
        for rank in range(1, draw(st.integers(1, 3)) + 1):
            terms = list(params) + ["?w0", "?w1"] + CONSTS
            pos = atoms(terms)
            neg = atoms(list(params) + CONSTS)
            tasks = []
            if callable_:
                for k in range(draw(st.integers(0, 3))):
                    tname, arity = draw(st.sampled_from(callable_))
                    tasks.append(TaskInstance(str(k + 1), tname, tuple(
                        draw(st.sampled_from(terms)) for _ in range(arity))))
            ids = [t.id for t in tasks]
            order = frozenset((a, b) for i, a in enumerate(ids) for b in ids[i + 1:]
                              if draw(st.booleans()))
            constraints = []
            if ids:
                for kind in draw(st.lists(st.sampled_from(["before", "after", "between"]),
                                          max_size=2)):
                    atom = atoms(terms, 1) or (("p0",) + ("k0",) * preds[0][1],)
                    a, b = draw(st.sampled_from(ids)), draw(st.sampled_from(ids))
                    constraints.append(StateConstraint(kind, atom[0], a,
                                                       b if kind == "between" else None))
            bindings = tuple(Binding("?w0", draw(st.sampled_from(CONSTS + ["?w1"])),
                                     draw(st.booleans())) for _ in range(draw(st.integers(0, 1))))
            net = TaskNetwork(tuple(tasks), order, bindings, tuple(dict.fromkeys(constraints)))
            methods.append(Method(name, params, rank, pos, neg, net))
    return Domain(f"rand{draw(st.integers(0, 999))}", tuple(preds), tuple(ops), tuple(methods),
                  draw(st.booleans()))


@settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(domains())
def test_random_domain_round_trip(d):
    text = print_domain(d)
    again = parse_domain(text)
    assert again == d
    assert print_domain(again) == text
