"""Grounded model: atoms, literals, durative actions, tasks and plans.

All values are immutable. Times and durations are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Optional

from .errors import IllFormedTask


def to_rational(value) -> Fraction:
    """Convert ``int``, ``Fraction`` or decimal/ratio text to an exact Fraction.

    Floats are refused: their binary value is rarely what was meant.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not times")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_rational(q: Fraction) -> str:
    """``p/q`` form used by traces and reports (integers print bare)."""
    return str(q)


@dataclass(frozen=True, order=True)
class Atom:
    predicate: str
    args: tuple[str, ...] = ()

    def __str__(self):
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(self.args)})"

    @classmethod
    def parse(cls, text: str) -> "Atom":
        parts = text.replace("(", " ").replace(")", " ").split()
        if not parts:
            raise ValueError(f"empty atom: {text!r}")
        return cls(parts[0], tuple(parts[1:]))


@dataclass(frozen=True, order=True)
class Literal:
    atom: Atom
    positive: bool = True

    def complement(self) -> "Literal":
        return Literal(self.atom, not self.positive)

    def __str__(self):
        return str(self.atom) if self.positive else f"(not {self.atom})"

    @classmethod
    def parse(cls, text: str) -> "Literal":
        """``"at r l1"`` is positive; ``"not at r l1"`` / ``"(not (at r l1))"`` negative."""
        parts = text.replace("(", " ").replace(")", " ").split()
        if parts and parts[0] in ("not", "¬"):
            return cls(Atom(parts[1], tuple(parts[2:])), False)
        return cls(Atom.parse(text), True)


class Guard(str, enum.Enum):
    ADD = "add"
    DEL = "del"


@dataclass(frozen=True, order=True)
class MutexAtom:
    """Lock on a literal during a macro.

    ``Guard.ADD`` locks additions of ``atom`` (written X_v), ``Guard.DEL``
    locks deletions (X_not-v).
    """

    guard: Guard
    atom: Atom

    def as_atom(self) -> Atom:
        return Atom(f"can-{self.guard.value}-{self.atom.predicate}", self.atom.args)

    @classmethod
    def for_literal(cls, literal: Literal) -> "MutexAtom":
        return cls(Guard.ADD if literal.positive else Guard.DEL, literal.atom)

    def __str__(self):
        return str(self.as_atom())


def add_set(literals: Iterable[Literal]) -> frozenset[Atom]:
    return frozenset(l.atom for l in literals if l.positive)


def del_set(literals: Iterable[Literal]) -> frozenset[Atom]:
    return frozenset(l.atom for l in literals if not l.positive)


@dataclass(frozen=True, eq=True)
class DurativeAction:
    name: str
    dur: Fraction
    pre_s: frozenset[Atom] = frozenset()
    pre_inv: frozenset[Atom] = frozenset()
    pre_e: frozenset[Atom] = frozenset()
    eff_s: frozenset[Literal] = frozenset()
    eff_e: frozenset[Literal] = frozenset()
    args: tuple[str, ...] = ()
    left: Optional["DurativeAction"] = None
    right: Optional["DurativeAction"] = None
    mutex: frozenset[MutexAtom] = frozenset()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "dur", to_rational(self.dur))
        for name in ("pre_s", "pre_inv", "pre_e", "eff_s", "eff_e", "mutex"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))
        object.__setattr__(self, "args", tuple(self.args))
        if (self.left is None) != (self.right is None):
            raise ValueError("a macro needs both a left and a right constituent")
        object.__setattr__(
            self,
            "_hash",
            hash((self.name, self.args, self.dur, self.pre_s, self.pre_inv, self.pre_e,
                  self.eff_s, self.eff_e, self.mutex, self.left, self.right)),
        )

    def __hash__(self):
        return self._hash

    @classmethod
    def make(cls, name, dur, pre_s=(), pre_inv=(), pre_e=(), eff_s=(), eff_e=(), args=()):
        """Build an ordinary action from short text forms (see Atom.parse / Literal.parse)."""

        def atoms(xs):
            return frozenset(x if isinstance(x, Atom) else Atom.parse(x) for x in xs)

        def lits(xs):
            return frozenset(x if isinstance(x, Literal) else Literal.parse(x) for x in xs)

        return cls(name, to_rational(dur), atoms(pre_s), atoms(pre_inv), atoms(pre_e),
                   lits(eff_s), lits(eff_e), tuple(args))

    @property
    def is_macro(self) -> bool:
        return self.left is not None

    @property
    def eff_s_add(self) -> frozenset[Atom]:
        return add_set(self.eff_s)

    @property
    def eff_s_del(self) -> frozenset[Atom]:
        return del_set(self.eff_s)

    @property
    def eff_e_add(self) -> frozenset[Atom]:
        return add_set(self.eff_e)

    @property
    def eff_e_del(self) -> frozenset[Atom]:
        return del_set(self.eff_e)

    def atoms(self) -> frozenset[Atom]:
        """Every atom in a condition or effect (mutex atoms excluded)."""
        return (self.pre_s | self.pre_inv | self.pre_e
                | frozenset(l.atom for l in self.eff_s | self.eff_e))

    def constituents(self) -> list["DurativeAction"]:
        """Ordinary actions in execution order; ``[self]`` for ordinary actions."""
        if not self.is_macro:
            return [self]
        return self.left.constituents() + self.right.constituents()

    def label(self) -> str:
        if not self.args:
            return f"({self.name})"
        return f"({self.name} {' '.join(self.args)})"

    def sort_key(self):
        return (self.name, self.args, self.dur, tuple(sorted(self.atoms())),
                tuple(sorted(self.eff_s | self.eff_e)), self.is_macro)

    def __str__(self):
        return self.label()


@dataclass(frozen=True)
class Violation:
    code: str
    atoms: frozenset[Atom] = frozenset()

    def __str__(self):
        if not self.atoms:
            return self.code
        return f"{self.code}: {' '.join(str(a) for a in sorted(self.atoms))}"


@dataclass(frozen=True)
class WellFormednessReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        # truthy when something is wrong, like a non-empty list
        return bool(self.violations)

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}


def validate_action(a: DurativeAction) -> WellFormednessReport:
    found = []
    overlap = a.eff_s_del & a.eff_s_add
    if overlap:
        found.append(Violation("start-delete-add-overlap", overlap))
    overlap = a.eff_s_del & a.pre_inv
    if overlap:
        found.append(Violation("start-delete-invariant-overlap", overlap))
    overlap = a.eff_e_del & a.eff_e_add
    if overlap:
        found.append(Violation("end-delete-add-overlap", overlap))
    if a.dur <= 0:
        found.append(Violation("non-positive-duration"))
    return WellFormednessReport(tuple(found))


@dataclass(frozen=True, order=True)
class TimedAction:
    t: Fraction
    action: DurativeAction = field(compare=False)
    _key: tuple = field(default=(), init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "t", to_rational(self.t))
        if self.t <= 0:
            raise ValueError(f"start time must be positive, got {self.t}")
        object.__setattr__(self, "_key", self.action.sort_key())

    def __eq__(self, other):
        if not isinstance(other, TimedAction):
            return NotImplemented
        return self.t == other.t and self.action == other.action

    def __hash__(self):
        return hash((self.t, self.action))

    @property
    def end(self) -> Fraction:
        return self.t + self.action.dur

    def __str__(self):
        return f"{self.t}: {self.action.label()} [{self.action.dur}]"


class Plan:
    """A finite set of time-stamped actions."""

    __slots__ = ("steps",)

    def __init__(self, steps: Iterable = ()):
        items = []
        for s in steps:
            if not isinstance(s, TimedAction):
                t, a = s
                s = TimedAction(to_rational(t), a)
            items.append(s)
        self.steps: frozenset[TimedAction] = frozenset(items)

    def __iter__(self) -> Iterator[TimedAction]:
        return iter(self.sorted())

    def __len__(self):
        return len(self.steps)

    def __contains__(self, step):
        return step in self.steps

    def __eq__(self, other):
        return isinstance(other, Plan) and self.steps == other.steps

    def __hash__(self):
        return hash(self.steps)

    def __repr__(self):
        return "Plan([" + ", ".join(str(s) for s in self.sorted()) + "])"

    def sorted(self) -> list[TimedAction]:
        return sorted(self.steps, key=lambda s: (s.t, s._key))

    def actions(self) -> frozenset[DurativeAction]:
        return frozenset(s.action for s in self.steps)

    def macros(self) -> list[TimedAction]:
        return [s for s in self.sorted() if s.action.is_macro]

    def replace(self, remove: Iterable[TimedAction], add: Iterable[TimedAction]) -> "Plan":
        return Plan((self.steps - frozenset(remove)) | frozenset(add))

    @property
    def makespan(self) -> Fraction:
        return max((s.end for s in self.steps), default=Fraction(0))


@dataclass(frozen=True)
class Clash:
    time: Fraction
    first: tuple[str, TimedAction]
    second: tuple[str, TimedAction]

    def __str__(self):
        (k1, s1), (k2, s2) = self.first, self.second
        return (f"{k1}({s1.action.label()}@{s1.t}) and "
                f"{k2}({s2.action.label()}@{s2.t}) coincide at t={self.time}")


@dataclass(frozen=True)
class ShapeReport:
    clashes: tuple[Clash, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.clashes

    def __bool__(self):
        return bool(self.clashes)


def validate_plan_shape(plan: Plan) -> ShapeReport:
    by_time = defaultdict(list)
    for step in plan.sorted():
        by_time[step.t].append(("start", step))
        by_time[step.end].append(("end", step))
    clashes = []
    for time in sorted(by_time):
        events = by_time[time]
        for i in range(len(events)):
            for j in range(i + 1, len(events)):
                if events[i][1] is not events[j][1]:
                    clashes.append(Clash(time, events[i], events[j]))
    return ShapeReport(tuple(clashes))


@dataclass(frozen=True)
class PlanningTask:
    atoms: frozenset[Atom]
    actions: frozenset[DurativeAction]
    init: frozenset[Atom]
    goal: frozenset[Atom]

    def __post_init__(self):
        for name in ("atoms", "actions", "init", "goal"):
            value = getattr(self, name)
            if not isinstance(value, frozenset):
                object.__setattr__(self, name, frozenset(value))
        if not self.init <= self.atoms:
            raise IllFormedTask(f"initial atoms outside V: {_show(self.init - self.atoms)}")
        if not self.goal <= self.atoms:
            raise IllFormedTask(f"goal atoms outside V: {_show(self.goal - self.atoms)}")
        for a in self.actions:
            outside = a.atoms() - self.atoms
            if outside:
                raise IllFormedTask(f"action {a.label()} mentions atoms outside V: {_show(outside)}")

    @classmethod
    def build(cls, actions, init=(), goal=(), atoms=()) -> "PlanningTask":
        """Task whose V is the given atoms plus everything mentioned anywhere."""
        actions = frozenset(actions)
        init, goal = _atoms(init), _atoms(goal)
        universe = set(_atoms(atoms)) | init | goal
        for a in actions:
            universe |= a.atoms()
        return cls(frozenset(universe), actions, init, goal)

    @classmethod
    def induced(cls, plan: Plan, base: "PlanningTask") -> "PlanningTask":
        """(V, {a | (t, a) in plan}, s0, goal) over the context of ``base``."""
        actions = plan.actions()
        universe = set(base.atoms)
        for a in actions:
            universe |= a.atoms()
        return cls(frozenset(universe), actions, base.init, base.goal)

    def sorted_actions(self) -> list[DurativeAction]:
        return sorted(self.actions, key=DurativeAction.sort_key)


def _atoms(xs) -> frozenset[Atom]:
    return frozenset(x if isinstance(x, Atom) else Atom.parse(x) for x in xs)


def _show(atoms) -> str:
    return " ".join(str(a) for a in sorted(atoms))
