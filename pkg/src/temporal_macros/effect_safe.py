"""Effect-safe tasks: mutex atoms become ordinary lock atoms.

Every macro falsifies its mutex atoms at its start and restores them at its
end. Any event whose effect would touch a locked literal requires the lock
atom, so it cannot happen while such a macro runs. Solutions of the
resulting task map back to solutions of the original task by replacing each
transformed action with its source (the base plan).
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IllFormedAction, IllFormedTask, NameClash, UnknownAction
from .model import (
    DurativeAction,
    Guard,
    Literal,
    MutexAtom,
    Plan,
    PlanningTask,
    TimedAction,
    validate_action,
)


@dataclass(frozen=True)
class EffectSafeTask:
    task: PlanningTask
    mutex_universe: frozenset[MutexAtom]
    origin: dict  # transformed action -> source action
    hat: dict  # source action -> transformed action

    def source(self, action_hat: DurativeAction) -> DurativeAction:
        try:
            return self.origin[action_hat]
        except KeyError:
            raise UnknownAction(f"{action_hat.label()} is not an action of the effect-safe task") from None


def _lock_atoms(mutexes):
    return frozenset(m.as_atom() for m in mutexes)


def effect_safe_action(a: DurativeAction, universe: frozenset[MutexAtom]) -> DurativeAction:
    own = a.mutex
    pre_s_locks = (set(own)
                   | {MutexAtom(Guard.ADD, m.atom) for m in own if m.guard is Guard.DEL}
                   | {MutexAtom.for_literal(l) for l in a.eff_s})
    pre_e_locks = {MutexAtom.for_literal(l) for l in a.eff_e} - own
    return DurativeAction(
        name=a.name,
        dur=a.dur,
        pre_s=a.pre_s | _lock_atoms(m for m in pre_s_locks if m in universe),
        pre_inv=a.pre_inv,
        pre_e=a.pre_e | _lock_atoms(m for m in pre_e_locks if m in universe),
        eff_s=a.eff_s | frozenset(Literal(m.as_atom(), False) for m in own),
        eff_e=a.eff_e | frozenset(Literal(m.as_atom(), True) for m in own),
        args=a.args,
    )


def build_effect_safe(task: PlanningTask) -> EffectSafeTask:
    for a in task.actions:
        report = validate_action(a)
        if not report.ok:
            raise IllFormedAction(a, [str(v) for v in report.violations])

    universe = frozenset().union(*(a.mutex for a in task.actions)) if task.actions else frozenset()
    lock_atoms = _lock_atoms(universe)
    predicates = {v.predicate for v in task.atoms}
    clashing = sorted({x.predicate for x in lock_atoms} & predicates)
    if clashing:
        raise NameClash(f"lock predicates collide with task predicates: {', '.join(clashing)}")

    origin, hat = {}, {}
    for a in task.sorted_actions():
        a_hat = effect_safe_action(a, universe)
        if a_hat in origin:
            raise IllFormedTask(
                f"{a.label()} and {origin[a_hat].label()} become the same effect-safe action")
        origin[a_hat] = a
        hat[a] = a_hat

    transformed = PlanningTask(
        atoms=task.atoms | lock_atoms,
        actions=frozenset(origin),
        init=task.init | lock_atoms,
        goal=task.goal,
    )
    return EffectSafeTask(transformed, universe, origin, hat)


def base_plan(plan_hat: Plan, est: EffectSafeTask) -> Plan:
    return Plan(TimedAction(s.t, est.source(s.action)) for s in plan_hat.steps)
