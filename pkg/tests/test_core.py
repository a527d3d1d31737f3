import pytest

from htnkit.core import (Action, Binding, Fresh, LabelMismatch, Method, NonGroundError,
                         NotApplicable, Operator, State, StateConstraint, TaskInstance,
                         TaskNetwork, UnificationFailure, UnsafeNegation, applicable, apply,
                         decompose_po, decompose_state, executable, fmt_atom, fmt_pred, id_key,
                         is_ground, match_args, missing_precondition, normalize,
                         satisfying_bindings, unify)
from htnkit.core.ops import decompose_po_detailed, rename_fresh


def test_atom_formatting():
    assert fmt_atom(("box-at", "b", "l1")) == "(box-at b l1)"
    assert fmt_pred(("truck-at", "t", "l2")) == "truck-at(t,l2)"


def test_unify_and_match():
    assert unify(("p", "?x", "b"), ("p", "a", "?y")) == {"?x": "a", "?y": "b"}
    assert unify(("p", "a"), ("p", "b")) is None
    assert unify(("p", "a"), ("q", "a")) is None
    assert match_args(("?x", "?x"), ("a", "b"), {}) is None
    assert match_args(("?x", "c"), ("a", "c"), {}) == {"?x": "a"}
    assert normalize({"?a": "?b", "?b": "c"}) == {"?a": "c", "?b": "c"}


def test_id_key_puts_input_ids_first():
    assert sorted(["#10", "#2", "a", "b", "#1"], key=id_key) == ["a", "b", "#1", "#2", "#10"]


def test_state_is_a_value():
    s = State([("p", "a"), ("q", "a", "b")])
    t = State([("q", "a", "b"), ("p", "a")])
    assert s == t and hash(s) == hash(t)
    assert ("p", "a") in s and len(s) == 2
    with pytest.raises(NonGroundError):
        State([("p", "?x")])


def _move():
    return Operator("!move", ("?x", "?from", "?to"),
                    pre_pos=(("at", "?x", "?from"),), pre_neg=(("blocked", "?to"),),
                    delete=(("at", "?x", "?from"),), add=(("at", "?x", "?to"),))


def test_apply_and_applicable():
    s0 = State([("at", "r", "a")])
    act = _move().instantiate(("r", "a", "b"))
    assert applicable(act, s0)
    s1 = apply(act, s0)
    assert s1 == State([("at", "r", "b")])
    assert not applicable(act, s1)
    assert missing_precondition(act, s1) == "precondition at(r,a) absent"
    with pytest.raises(NotApplicable):
        apply(act, s1)
    blocked = State([("at", "r", "a"), ("blocked", "b")])
    assert missing_precondition(act, blocked) == "negative precondition blocked(b) present"


def test_non_ground_action_rejected():
    with pytest.raises(NonGroundError):
        applicable(_move().instantiate(("r", "?y", "b")), State())


def test_executable_reports_first_failure():
    op = _move()
    seq = [op.instantiate(("r", "a", "b")), op.instantiate(("r", "b", "c")),
           op.instantiate(("r", "a", "b"))]
    rep = executable(seq, State([("at", "r", "a")]))
    assert not rep.ok and rep.failed_at == 2 and len(rep.states) == 3
    assert executable(seq[:2], State([("at", "r", "a")])).ok


def test_satisfying_bindings(kernel):
    s = State([("p", "a"), ("q", "a", "b"), ("p", "b"), ("p", "c"), ("q", "c", "c")])
    got = list(satisfying_bindings([("p", "?x")], [("q", "?x", "b")], s))
    assert got == [{"?x": "b"}, {"?x": "c"}]
    got = list(satisfying_bindings([("p", "?x"), ("q", "?x", "?y")], [], s))
    assert got == [{"?x": "a", "?y": "b"}, {"?x": "c", "?y": "c"}]
    got = list(satisfying_bindings([("q", "?x", "?x")], [], s))
    assert got == [{"?x": "c"}]
    assert list(satisfying_bindings([("p", "?x")], [], s, {"?x": "b"})) == [{"?x": "b"}]
    with pytest.raises(UnsafeNegation):
        list(satisfying_bindings([("p", "?x")], [("q", "?x", "?z")], s))


def _net(ids, order=(), name="t"):
    return TaskNetwork(tuple(TaskInstance(i, name, ()) for i in ids), frozenset(order))


def test_network_ordering():
    net = _net("abc", [("a", "b"), ("b", "c")])
    assert net.precedes("a", "c") and not net.precedes("c", "a")
    assert [t.id for t in net.minimal()] == ["a"]
    assert net.is_total()
    assert not _net("abc", [("a", "b")]).is_total()
    cyclic = _net("ab", [("a", "b"), ("b", "a")])
    assert not cyclic.is_acyclic()
    with pytest.raises(ValueError):
        cyclic.closure


def test_rename_fresh_is_isomorphic():
    net = _net("ab", [("a", "b")])
    out = rename_fresh(net, Fresh())
    assert [t.id for t in out.tasks] == ["#1", "#2"]
    assert out.ordering == frozenset({("#1", "#2")})


def _method():
    sub = TaskNetwork(
        (TaskInstance("1", "!pick", ("?x",)), TaskInstance("2", "!drop", ("?x", "?where"))),
        frozenset({("1", "2")}),
    )
    return Method("fetch", ("?x",), 1, (("at", "?x", "?where"),), (), sub)


def test_decompose_po_inherits_constraints():
    tn = TaskNetwork(
        (TaskInstance("a", "!start", ()), TaskInstance("g", "fetch", ("box",)),
         TaskInstance("z", "!stop", ())),
        frozenset({("a", "g"), ("g", "z")}),
        (),
        (StateConstraint("before", ("ready",), "g"), StateConstraint("after", ("done",), "g")),
    )
    net, new = decompose_po_detailed(tn, "g", _method(), Fresh())
    ids = [t.id for t in new]
    assert ids == ["#2", "#3"]
    assert [t.atom for t in new] == [("!pick", "box"), ("!drop", "box", "?where#1")]
    assert net.ordering == frozenset({("a", "#2"), ("a", "#3"), ("#2", "z"), ("#3", "z"),
                                      ("#2", "#3")})
    assert set(net.constraints) == {StateConstraint("before", ("ready",), "#2"),
                                    StateConstraint("after", ("done",), "#3")}


def test_decompose_po_with_variable_task_adds_binding():
    tn = TaskNetwork((TaskInstance("g", "fetch", ("?b",)),))
    net = decompose_po(tn, "g", _method(), Fresh())
    assert net.tasks[0].args == ("?b",)


def test_decompose_label_mismatch():
    tn = TaskNetwork((TaskInstance("g", "other", ("box",)),))
    with pytest.raises(LabelMismatch):
        decompose_po(tn, "g", _method(), Fresh())
    tn = TaskNetwork((TaskInstance("g", "fetch", ("a", "b")),))
    with pytest.raises(UnificationFailure):
        decompose_po(tn, "g", _method(), Fresh())


def test_decompose_state_grounds_method_variables():
    s = State([("at", "box", "shelf")])
    tn = TaskNetwork((TaskInstance("g", "fetch", ("box",)),))
    net = decompose_state(s, tn, "g", _method(), {"?x": "box", "?where": "shelf"}, Fresh())
    assert [t.atom for t in net.tasks] == [("!pick", "box"), ("!drop", "box", "shelf")]
    assert all(is_ground(t.atom) for t in net.tasks)


def test_empty_method_removes_task_and_bridges_order():
    m = Method("noop", (), 1, (), (), TaskNetwork())
    tn = TaskNetwork((TaskInstance("a", "!x", ()), TaskInstance("g", "noop", ()),
                      TaskInstance("z", "!y", ())),
                     frozenset({("a", "g"), ("g", "z")}))
    net = decompose_po(tn, "g", m, Fresh())
    assert [t.id for t in net.tasks] == ["a", "z"]
    assert net.ordering == frozenset({("a", "z")})


def test_binding_and_action_strings():
    assert str(Binding("?x", "a", False))
    act = Action("!a", ("x",), (), (), (), ())
    assert act.step == ("!a", "x")
