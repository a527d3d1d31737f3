import dataclasses

import pytest

from htnkit.core import Problem, TaskNetwork
from htnkit.core.model import Plan
from htnkit.state_engine import plan_state
from htnkit.validate import VALID, Invalid, validate_plan

from .conftest import load
from .corpus import emitted_plans, first_difference, mutants, problems, replay_failure


def _fig1():
    domain, problem = load("logistics.htd", "fig1.htp")
    return domain, problem, plan_state(domain, problem).plan


def test_running_example_is_valid():
    domain, problem, plan = _fig1()
    assert validate_plan(plan, problem, domain) == VALID
    assert str(VALID) == "valid"


def test_swapped_steps_fail_at_unload():
    domain, problem, plan = _fig1()
    steps = list(plan.steps)
    steps[1], steps[2] = steps[2], steps[1]
    v = validate_plan(Plan(tuple(steps)), problem, domain)
    assert v == Invalid(1, "precondition truck-at(t,l2) absent")
    assert str(v) == "invalid at step 1: precondition truck-at(t,l2) absent"


def test_dropped_step_with_trace():
    domain, problem, plan = _fig1()
    v = validate_plan(dataclasses.replace(plan, steps=plan.steps[:3] + plan.steps[4:]),
                      problem, domain)
    assert v.index == 3 and not v


def test_empty_plan_for_empty_network():
    domain = load("logistics.htd")
    problem = Problem("nothing", "logistics", (), TaskNetwork())
    assert validate_plan(Plan(()), problem, domain)
    assert validate_plan(Plan((("!drive", "t", "l1", "l2"),)), problem, domain) == \
        Invalid(0, "the initial network is empty")


def test_trace_faults_have_no_step():
    domain, problem, plan = _fig1()
    rec = plan.trace[0]
    bad = dataclasses.replace(plan, trace=(dataclasses.replace(rec, method="deliver#9"),)
                              + plan.trace[1:])
    v = validate_plan(bad, problem, domain)
    assert v.index is None and "no method branch deliver#9" in v.reason
    assert str(v).startswith("invalid at trace: ")


def test_plan_from_wrong_problem():
    domain, problem, plan = _fig1()
    _, other = load("logistics.htd", "two-trucks.htp")
    assert not validate_plan(plan, other, domain)


def test_unknown_operator():
    domain, problem, _ = _fig1()
    assert validate_plan(Plan((("!teleport", "b"),)), problem, domain) == \
        Invalid(0, "unknown operator !teleport")


@pytest.mark.parametrize("k", range(len(problems())))
def test_emitted_plans_validate(k):
    domain, problem = problems()[k]
    plans = emitted_plans(domain, problem)
    assert plans
    for plan in plans:
        assert validate_plan(plan, problem, domain), (problem.name, plan.steps)


def test_mutants_of_fig1_rejected_at_first_change():
    domain, problem, plan = _fig1()
    consts = sorted({a for f in problem.init for a in f[1:]})
    seen = 0
    for kind, m in mutants(plan, consts):
        v = validate_plan(m, problem, domain)
        assert not v and v.index == first_difference(m.steps, plan.steps), (kind, m.steps, v)
        seen += 1
    # 15 swaps, 6 drops, 18 corrupted arguments
    assert seen == 39


def test_reordering_unordered_tasks_fails_where_execution_fails():
    domain, problem = load("fig3.htd", "fig3a.htp")
    plan = plan_state(domain, problem).plan
    i, j = 2, 3
    steps, ids = list(plan.steps), list(plan.step_ids)
    steps[i], steps[j] = steps[j], steps[i]
    ids[i], ids[j] = ids[j], ids[i]
    m = dataclasses.replace(plan, steps=tuple(steps), step_ids=tuple(ids))
    # c and d are unordered, so the trace allows the swap; the unload then
    # finds the truck gone
    v = validate_plan(m, problem, domain)
    assert v.index == 3 == replay_failure(m.steps, domain, problem.init)
