"""Unfold time-stamped macros into their constituents.

A step ``(t0, a1 ▷ a2)`` is replaced by ``(t1, a1)`` and ``(t2, a2)`` placed
so close to the macro's own start, midpoint and end that no other event of
the plan falls in between. ``delta`` measures that free neighbourhood.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import CertificationFailure, NotAMacro, NotASolution, NotInPlan
from .model import Plan, PlanningTask, TimedAction, format_rational
from .semantics import check_plan, unroll

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RefinementStep:
    removed: TimedAction
    inserted: tuple[TimedAction, TimedAction]
    delta: Fraction

    def __str__(self):
        (s1, s2) = self.inserted
        return (f"split {self.removed.action.label()}@{format_rational(self.removed.t)} "
                f"delta={format_rational(self.delta)} -> "
                f"{s1.action.label()}@{format_rational(s1.t)}, "
                f"{s2.action.label()}@{format_rational(s2.t)}")


def _check_target(plan: Plan, step: TimedAction):
    if step not in plan:
        raise NotInPlan(f"{step} is not a step of the plan")
    if not step.action.is_macro:
        raise NotAMacro(f"{step.action.label()} is not a macro-action")


def delta(plan: Plan, step: TimedAction) -> Fraction:
    _check_target(plan, step)
    trace = unroll(PlanningTask.build(plan.actions()), plan)
    stamps = trace.stamps[: 2 * len(plan)]
    t0, a0 = step.t, step.action
    references = (t0, t0 + a0.left.dur, t0 + a0.dur)
    return min(ref - tau for ref in references for tau in stamps if tau < ref)


def refine_step(plan: Plan, step: TimedAction) -> tuple[Plan, RefinementStep]:
    d = delta(plan, step)
    a0 = step.action
    first = TimedAction(step.t - d / 2, a0.left)
    second = TimedAction(step.t + a0.left.dur - d / 4, a0.right)
    refined = plan.replace([step], [first, second])
    return refined, RefinementStep(step, (first, second), d)


def refine_once(plan: Plan, step: TimedAction) -> Plan:
    return refine_step(plan, step)[0]


Order = Union[str, Callable[[list[TimedAction]], TimedAction]]


def _pick(macros: list[TimedAction], order: Order) -> TimedAction:
    if callable(order):
        return order(macros)
    if order == "descending":
        return max(macros, key=lambda s: s.t)
    if order == "ascending":
        return min(macros, key=lambda s: s.t)
    raise ValueError(f"unknown refinement order {order!r}")


def refine_all(plan: Plan, task: PlanningTask, order: Order = "descending",
               audit: Optional[list] = None) -> Plan:
    """Refine until no macro is left, re-checking every intermediate plan.

    ``task`` supplies the atoms, initial state and goal; the action set is
    always the one induced by the current plan.
    """
    report = check_plan(PlanningTask.induced(plan, task), plan)
    if not report.solves:
        raise NotASolution("plan to refine is not a solution: "
                           + "; ".join(str(v) for v in report.violations), report)
    while True:
        macros = plan.macros()
        if not macros:
            return plan
        plan, step = refine_step(plan, _pick(macros, order))
        log.debug("%s", step)
        if audit is not None:
            audit.append(step)
        report = check_plan(PlanningTask.induced(plan, task), plan)
        if not report.solves:
            raise CertificationFailure(
                f"refined plan after '{step}' is not a solution: "
                + "; ".join(str(v) for v in report.violations), report)
