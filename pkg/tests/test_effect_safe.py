import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from temporal_macros.composer import compose
from temporal_macros.effect_safe import base_plan, build_effect_safe, effect_safe_action
from temporal_macros.errors import NameClash, UnknownAction
from temporal_macros.model import Atom, DurativeAction, Literal, Plan, PlanningTask, TimedAction
from temporal_macros.planner import SearchLimits, Solved, solve
from temporal_macros.semantics import check_plan, unroll

from support import atoms, rescue_task, get, lits, move, move_get, random_task


def robot_task(actions, goal=("holding r",)):
    return PlanningTask.build(actions, init=["at r l1", "free l2", "empty r"], goal=goal)


LOCKS = atoms("can-del-free l2", "can-del-empty r", "can-del-at r l2",
              "can-add-free l2", "can-add-empty r")


def test_ordinary_actions_are_untouched():
    task = robot_task([move(), get()])
    est = build_effect_safe(task)
    assert est.mutex_universe == frozenset()
    assert est.task.actions == task.actions
    assert est.task.init == task.init


def test_lone_macro_locks_its_own_atoms():
    mg = move_get()
    est = build_effect_safe(robot_task([mg]))
    hat = est.hat[mg]
    assert hat.pre_s == mg.pre_s | LOCKS
    assert hat.eff_s == mg.eff_s | frozenset(Literal(x, False) for x in LOCKS)
    assert hat.eff_e == mg.eff_e | frozenset(Literal(x, True) for x in LOCKS)
    assert hat.pre_inv == mg.pre_inv
    assert hat.pre_e == mg.pre_e
    assert est.task.init == robot_task([mg]).init | LOCKS
    assert est.source(hat) is mg


def test_start_effects_need_locks_held_by_other_macros():
    mg = move_get()
    back = compose(move("r", "l2", "l1"), get("r", "l1"), name="move-get").macro
    est = build_effect_safe(robot_task([mg, back]))
    assert Atom("can-add-free", ("l1",)) in est.hat[mg].pre_s
    assert Atom("can-add-at", ("r", "l2")) not in est.hat[mg].pre_s


def test_end_effects_need_foreign_locks_only():
    mg = move_get()
    plain = DurativeAction.make("drop", 1, eff_e=["empty r", "not holding r"], args=("r",))
    est = build_effect_safe(robot_task([mg, plain]))
    assert est.hat[plain].pre_e == atoms("can-add-empty r")
    assert Atom("can-add-empty", ("r",)) not in est.hat[mg].pre_e


def test_rescued_macro_locks_its_end_deletion():
    a0, a, task = rescue_task()
    est = build_effect_safe(task)
    assert Literal(Atom("can-add-v2"), False) in est.hat[a0].eff_s
    assert Atom("can-add-v2") in est.hat[a].pre_s


def test_lock_names_must_be_free():
    mg = move_get()
    task = PlanningTask.build([mg], init=["can-add-free l2"])
    with pytest.raises(NameClash):
        build_effect_safe(task)


def test_base_plan_keeps_stamps():
    mg = move_get()
    est = build_effect_safe(robot_task([mg]))
    assert base_plan(Plan(), est) == Plan()
    assert base_plan(Plan([(1, est.hat[mg])]), est) == Plan([(1, mg)])
    with pytest.raises(UnknownAction):
        base_plan(Plan([(1, mg)]), est)


def test_base_plan_of_solver_output_with_two_macros():
    first = move_get()
    second = compose(DurativeAction.make("drop", 1, pre_s=["holding r"], eff_e=["not holding r", "done r"],
                                         args=("r",)),
                     DurativeAction.make("wait", 1, eff_e=["rested r"], args=("r",)),
                     name="drop-wait").macro
    task = robot_task([first, second], goal=("done r", "rested r"))
    est = build_effect_safe(task)
    result = solve(est.task, SearchLimits(max_steps=2, horizon=20))
    assert isinstance(result, Solved)
    plan = base_plan(result.plan, est)
    assert len(plan) == 2 and len(plan.macros()) == 2
    assert check_plan(task, plan).solves


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**9))
def test_restricted_trace_equals_base_trace(seed):
    rng = random.Random(seed)
    task = None
    while task is None:
        task = random_task(rng)
    est = build_effect_safe(task)
    acts = est.task.sorted_actions()
    steps = {}
    for _ in range(rng.randint(1, 4)):
        steps[Fraction(rng.randint(1, 30), rng.choice([1, 2, 3]))] = rng.choice(acts)
    plan_hat = Plan(steps.items())
    try:
        hat_trace = unroll(est.task, plan_hat)
    except Exception:
        return
    trace = unroll(task, base_plan(plan_hat, est))
    assert hat_trace.stamps == trace.stamps
    for eh, e in zip(hat_trace, trace):
        assert eh.state & task.atoms == e.state
        assert (eh.event.kind, eh.event.step and est.source(eh.event.step.action)) == \
            (e.event.kind, e.event.step and e.event.step.action)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_base_plans_of_effect_safe_solutions_solve_the_original(seed):
    rng = random.Random(seed)
    task = None
    while task is None:
        task = random_task(rng)
    est = build_effect_safe(task)
    result = solve(est.task, SearchLimits(max_steps=3, horizon=20, node_budget=20000))
    if isinstance(result, Solved):
        assert check_plan(task, base_plan(result.plan, est)).solves


def test_hat_of_ordinary_action_without_locks_is_identity():
    a = DurativeAction.make("a", 1, eff_s=["p"])
    assert effect_safe_action(a, frozenset()) == a
