"""Plan execution semantics: unroll a plan into time-stamped states, check it.

A plan with ``n`` steps induces ``2n + 1`` entries. Entry 0 is the initial
state at stamp 0; every later entry is the start or the end of exactly one
step, processed in strictly increasing time order.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ShapeViolation, UnknownAction
from .model import (
    Atom,
    Literal,
    Plan,
    PlanningTask,
    TimedAction,
    format_rational,
    validate_plan_shape,
)


@dataclass(frozen=True)
class ScheduledEffect:
    t_end: Fraction
    pre_inv: frozenset[Atom]
    pre_e: frozenset[Atom]
    eff_e: frozenset[Literal]
    owner: TimedAction

    @classmethod
    def of(cls, step: TimedAction) -> "ScheduledEffect":
        a = step.action
        return cls(step.end, a.pre_inv, a.pre_e, a.eff_e, step)


class EventKind(str, enum.Enum):
    INITIAL = "initial"
    START = "start"
    END = "end"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    step: Optional[TimedAction] = None

    def descriptor(self):
        """Event identity without its time stamp."""
        return (self.kind.value, None if self.step is None else self.step.action)


@dataclass(frozen=True)
class TraceEntry:
    index: int
    stamp: Fraction
    state: frozenset[Atom]
    scheduled: frozenset[ScheduledEffect]
    event: Event

    def running_invariants(self) -> frozenset[Atom]:
        out = frozenset()
        for f in self.scheduled:
            out |= f.pre_inv
        return out


@dataclass(frozen=True)
class Trace:
    entries: tuple[TraceEntry, ...]

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    @property
    def stamps(self) -> list[Fraction]:
        return [e.stamp for e in self.entries]

    @property
    def final_state(self) -> frozenset[Atom]:
        return self.entries[-1].state

    def descriptors(self) -> list:
        return [e.event.descriptor() for e in self.entries]


def _apply(state: frozenset[Atom], literals) -> frozenset[Atom]:
    adds = {l.atom for l in literals if l.positive}
    dels = {l.atom for l in literals if not l.positive}
    return frozenset(adds | (state - dels))


def unroll(task: PlanningTask, plan: Plan) -> Trace:
    shape = validate_plan_shape(plan)
    if not shape.ok:
        raise ShapeViolation(shape.clashes)
    for step in plan.steps:
        if step.action not in task.actions:
            raise UnknownAction(f"{step.action.label()} is not an action of the task")

    starts = plan.sorted()
    entries = [TraceEntry(0, Fraction(0), task.init, frozenset(), Event(EventKind.INITIAL))]
    state = task.init
    scheduled: frozenset[ScheduledEffect] = frozenset()
    stamp = Fraction(0)
    next_start = 0
    for index in range(1, 2 * len(plan) + 1):
        candidates = []
        if next_start < len(starts):
            # starts are sorted and all > previous stamps consumed so far
            candidates.append((starts[next_start].t, EventKind.START, starts[next_start]))
        for f in scheduled:
            candidates.append((f.t_end, EventKind.END, f))
        candidates.sort(key=lambda c: c[0])
        if len(candidates) > 1 and candidates[0][0] == candidates[1][0]:
            raise RuntimeError(f"tied event stamps at {candidates[0][0]} despite distinct plan shape")
        stamp, kind, item = candidates[0]
        if kind is EventKind.START:
            step = item
            next_start += 1
            state = _apply(state, step.action.eff_s)
            scheduled = scheduled | {ScheduledEffect.of(step)}
        else:
            step = item.owner
            state = _apply(state, item.eff_e)
            scheduled = scheduled - {item}
        entries.append(TraceEntry(index, stamp, state, scheduled, Event(kind, step)))
    return Trace(tuple(entries))


class ViolationKind(str, enum.Enum):
    INVARIANT_BROKEN = "InvariantBroken"
    START_PRE_MISSING = "StartPreMissing"
    END_PRE_MISSING = "EndPreMissing"
    GOAL_MISSING = "GoalMissing"


@dataclass(frozen=True)
class CheckViolation:
    index: int
    kind: ViolationKind
    atoms: frozenset[Atom]
    step: Optional[TimedAction] = None

    def __str__(self):
        who = f" of {self.step.action.label()}@{self.step.t}" if self.step else ""
        missing = " ".join(str(a) for a in sorted(self.atoms))
        return f"[{self.index}] {self.kind.value}{who}: {missing}"


@dataclass(frozen=True)
class CheckReport:
    violations: tuple[CheckViolation, ...]
    trace: Trace = field(repr=False)

    @property
    def consistent(self) -> bool:
        return all(v.kind is ViolationKind.GOAL_MISSING for v in self.violations)

    @property
    def solves(self) -> bool:
        return not self.violations


def check_plan(task: PlanningTask, plan: Plan) -> CheckReport:
    trace = unroll(task, plan)
    found = []
    for i in range(1, len(trace)):
        entry, before = trace[i], trace[i - 1]
        step = entry.event.step
        if entry.event.kind is EventKind.START:
            missing = step.action.pre_s - before.state
            if missing:
                found.append(CheckViolation(i, ViolationKind.START_PRE_MISSING, missing, step))
        else:
            missing = step.action.pre_e - before.state
            if missing:
                found.append(CheckViolation(i, ViolationKind.END_PRE_MISSING, missing, step))
        for f in sorted(entry.scheduled, key=lambda f: f.t_end):
            missing = f.pre_inv - entry.state
            if missing:
                found.append(CheckViolation(i, ViolationKind.INVARIANT_BROKEN, missing, f.owner))
    missing = task.goal - trace.final_state
    if missing:
        found.append(CheckViolation(len(trace) - 1, ViolationKind.GOAL_MISSING, missing))
    return CheckReport(tuple(found), trace)


def trace_to_text(trace: Trace) -> str:
    """One line per entry: ``i stamp event action | +added -deleted``."""
    lines = []
    previous = None
    for e in trace:
        action = "-" if e.event.step is None else e.event.step.action.label()
        if previous is None:
            delta = " ".join(str(a) for a in sorted(e.state))
        else:
            added = sorted(e.state - previous)
            deleted = sorted(previous - e.state)
            delta = " ".join([f"+{a}" for a in added] + [f"-{a}" for a in deleted])
        lines.append(f"{e.index} {format_rational(e.stamp)} {e.event.kind.value} {action} | {delta}".rstrip())
        previous = e.state
    return "\n".join(lines) + "\n"


def trace_to_records(trace: Trace) -> list[dict]:
    records = []
    previous = frozenset()
    for e in trace:
        step = e.event.step
        records.append({
            "index": e.index,
            "stamp": format_rational(e.stamp),
            "event": e.event.kind.value,
            "action": None if step is None else step.action.label(),
            "start": None if step is None else format_rational(step.t),
            "state": [str(a) for a in sorted(e.state)],
            "added": [str(a) for a in sorted(e.state - previous)],
            "deleted": [str(a) for a in sorted(previous - e.state)],
            "scheduled": [
                {"end": format_rational(f.t_end), "action": f.owner.action.label(),
                 "start": format_rational(f.owner.t)}
                for f in sorted(e.scheduled, key=lambda f: f.t_end)
            ],
        })
        previous = e.state
    return records


def trace_to_json(trace: Trace) -> str:
    return json.dumps(trace_to_records(trace), indent=2) + "\n"
