import pytest

from htnkit.core import Budget, OrderingViolation, ProtectionViolation, State, TaskInstance, TaskNetwork
from htnkit.io import parse_problem
from htnkit.result import Status
from htnkit.state_engine import all_plans_state, check_protection, frontier_tasks, plan_state
from htnkit.validate import validate_plan

from .conftest import load

FIG1 = [
    ("!load-truck", "t", "b", "l1"),
    ("!drive", "t", "l1", "l2"),
    ("!unload-truck", "t", "b", "l2"),
    ("!load-plane", "p", "b", "l2"),
    ("!fly", "p", "l2", "l4"),
    ("!unload-plane", "p", "b", "l4"),
]


def test_fig1_plan_and_counters(kernel):
    domain, problem = load("logistics.htd", "fig1.htp")
    res = plan_state(domain, problem)
    assert res.status is Status.FOUND and res.exit_code == 0
    assert list(res.plan.steps) == FIG1
    # truck leg, plane leg, arrival: three decompositions; one node per
    # decomposition and per step plus the root
    assert (res.stats.decompositions, res.stats.applications, res.stats.nodes) == (3, 6, 10)
    assert [r.method for r in res.plan.trace] == ["deliver#2", "deliver#1", "deliver#3"]
    assert validate_plan(res.plan, problem, domain)


def test_fig1_is_deterministic():
    domain, problem = load("logistics.htd", "fig1.htp")
    first = plan_state(domain, problem)
    for _ in range(3):
        again = plan_state(domain, problem)
        assert again.plan == first.plan and again.stats == first.stats


def test_already_delivered_box_gives_empty_plan():
    domain, problem = load("logistics.htd", "deliver-l4.htp")
    res = plan_state(domain, problem)
    assert res.found and res.plan.steps == ()
    assert res.stats.decompositions == 1 and res.stats.applications == 0
    assert res.plan.trace[0].method == "deliver#3"


def test_two_trucks_give_two_plans(kernel):
    domain, problem = load("logistics.htd", "two-trucks.htp")
    res = all_plans_state(domain, problem)
    assert res.complete and len(res.plans) == 2
    trucks = sorted(p.steps[0][1] for p in res.plans)
    assert trucks == ["t1", "t2"]
    a, b = (p.steps for p in res.plans)
    assert [s[0] for s in a] == [s[0] for s in b]


def test_fig1_has_a_single_plan():
    domain, problem = load("logistics.htd", "fig1.htp")
    assert len(all_plans_state(domain, problem).plans) == 1


def test_no_plane_is_unsolvable():
    domain, problem = load("logistics.htd", "no-plane.htp")
    res = plan_state(domain, problem)
    assert res.status is Status.NO_SOLUTION and res.exit_code == 1 and res.complete


def test_budget_exhaustion_is_distinct():
    domain, problem = load("logistics.htd", "fig1.htp")
    res = plan_state(domain, problem, Budget(max_decompositions=1))
    assert res.status is Status.BUDGET_EXHAUSTED and res.exit_code == 2
    res = plan_state(domain, problem, Budget(max_decompositions=3))
    assert res.found
    res = plan_state(domain, problem, Budget(max_decompositions=100, max_network_size=2))
    assert res.status is Status.BUDGET_EXHAUSTED


def test_return_trip_uses_fetch_branches():
    domain, problem = load("logistics.htd", "return-trip.htp")
    res = plan_state(domain, problem)
    assert res.found and validate_plan(res.plan, problem, domain)
    assert {"deliver#4", "deliver#5"} & {r.method for r in res.plan.trace}


def test_blocks_world(kernel):
    domain, problem = load("blocks.htd", "stack2.htp")
    res = plan_state(domain, problem)
    assert list(res.plan.steps) == [("!takeoff", "a", "b"), ("!puton", "b", "a")]
    domain, problem = load("blocks.htd", "sussman.htp")
    res = plan_state(domain, problem)
    assert res.found and len(res.plan) == 4
    assert validate_plan(res.plan, problem, domain)


def test_frontier_styles():
    net = TaskNetwork((TaskInstance("#2", "!a", ()), TaskInstance("b", "!b", ()),
                       TaskInstance("c", "!c", ())), frozenset({("b", "c")}))
    assert [t.id for t in frontier_tasks(net, "utd")] == ["b", "#2"]
    assert [t.id for t in frontier_tasks(net, "potd")] == ["b", "#2"]
    with pytest.raises(OrderingViolation):
        frontier_tasks(net, "totd")
    with pytest.raises(ValueError):
        frontier_tasks(net, "sideways")


def test_unordered_interleavings():
    domain, problem = load("fig3.htd", "fig3a.htp")
    res = plan_state(domain, problem, all_solutions=True, style="utd", protections=False)
    assert [p.steps[-2:] for p in res.plans] == [(("!unload-truck", "t1", "b1", "l2"),
                                                  ("!drive", "t1", "l2", "l3"))]


def test_protection_prunes_early():
    domain, problem = load("fig3.htd", "fig3a.htp")
    off = plan_state(domain, problem, all_solutions=True, style="utd", protections=False)
    on = plan_state(domain, problem, all_solutions=True, style="utd", protections=True)
    assert [p.steps for p in on.plans] == [p.steps for p in off.plans]
    # without protection the early drive is applied and fails one step later
    assert (off.stats.applications, on.stats.applications) == (5, 4)


PARKED = """(define (problem parked) (:domain fig3)
  (:init (truck-at t1 l1) (adjacent l1 l2) (adjacent l2 l3))
  (:network (:tasks (b (!drive t1 l1 l2)) (d (!drive t1 l2 l3))) (:order (b d))))"""


def test_protection_violation_blocks_plan():
    domain = load("fig3.htd")
    problem = parse_problem(PARKED, domain)
    assert plan_state(domain, problem, protections=False).found
    assert plan_state(domain, problem, protections=True).status is Status.NO_SOLUTION


def test_check_protection_order():
    domain = load("fig3.htd")
    ops = domain.operator_map
    s = State([("truck-at", "t1", "l2"), ("in-truck", "b1", "t1")])
    active = frozenset({("truck-at", "t1", "l2")})
    drive = ops["!drive"].instantiate(("t1", "l2", "l3"))
    with pytest.raises(ProtectionViolation):
        check_protection(drive, s, active)
    unload = ops["!unload-truck"].instantiate(("t1", "b1", "l2"))
    assert check_protection(unload, s, active) == frozenset()
    assert check_protection(drive, s, frozenset()) == frozenset({("truck-at", "t1", "l3")})


def test_commit_keeps_first_branch():
    domain, problem = load("logistics.htd", "two-trucks.htp")
    res = plan_state(domain, problem, all_solutions=True, commit=True)
    # both trucks come from bindings of the same branch, so committing keeps both
    assert len(res.plans) == 2
