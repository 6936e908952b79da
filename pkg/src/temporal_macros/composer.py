"""Sequential composition of two durative actions into a macro-action.

``compose(a1, a2)`` builds ``a1 ▷ a2``: delete effects that happen inside the
macro (end of ``a1``, start of ``a2``) are pulled to its start, add effects
inside it are postponed to its end, and conditions are kept as invariants
only where that cannot make the macro inapplicable. Literals whose value must
not be touched by concurrent actions while the macro runs are recorded as
mutex atoms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .errors import CompositionError, IllFormedAction, TooShort
from .model import Atom, DurativeAction, Guard, Literal, MutexAtom, validate_action


@dataclass(frozen=True)
class Abbreviations:
    pre1: frozenset[Atom]
    pre2: frozenset[Atom]
    add1: frozenset[Atom]
    del1: frozenset[Atom]
    add12: frozenset[Atom]
    del12: frozenset[Atom]
    del2: frozenset[Atom]

    @classmethod
    def of(cls, a1: DurativeAction, a2: DurativeAction) -> "Abbreviations":
        return cls(
            pre1=a1.pre_inv | a1.pre_e,
            pre2=a2.pre_inv | a2.pre_e,
            add1=a1.eff_s_add | a1.eff_e_add,
            del1=a1.eff_s_del | a1.eff_e_del,
            add12=a1.eff_e_add | a2.eff_s_add,
            del12=a1.eff_e_del | a2.eff_s_del,
            del2=a2.eff_s_del | a2.eff_e_del,
        )


class UndefinedReason(str, enum.Enum):
    INVARIANT_DELETED_AT_START = "InvariantDeletedAtStart"
    END_PRE_FALSIFIED_INSIDE = "EndPreFalsifiedInside"


@dataclass(frozen=True)
class Defined:
    macro: DurativeAction

    defined = True


@dataclass(frozen=True)
class Undefined:
    reason: UndefinedReason
    witnesses: frozenset[Atom]
    step: int = 0
    """Index (in a ``compose_seq`` list) of the left operand whose composition failed."""
    also: tuple = ()
    """Further ``(reason, witnesses)`` pairs when both provisos fail."""

    defined = False

    def __str__(self):
        atoms = " ".join(str(a) for a in sorted(self.witnesses))
        return f"undefined at step {self.step}: {self.reason.value} {{{atoms}}}"


CompositionOutcome = Union[Defined, Undefined]


def mutex_atoms(a1: DurativeAction, a2: DurativeAction,
                macro_pre_inv: frozenset[Atom]) -> frozenset[MutexAtom]:
    ab = Abbreviations.of(a1, a2)
    locked_true = (
        (ab.add12 - (a2.eff_e_add | ab.del2))
        | (ab.pre1 & ab.del12)
        | ((a2.pre_s & a2.eff_s_del) - a1.eff_e_add)
        | (ab.pre2 & ab.add12)
    ) - macro_pre_inv
    return (frozenset(MutexAtom(Guard.DEL, v) for v in locked_true)
            | frozenset(MutexAtom(Guard.ADD, v) for v in ab.del12)
            | a2.mutex)


def _default_args(a1: DurativeAction, a2: DurativeAction) -> tuple[str, ...]:
    seen = []
    for x in a1.args + a2.args:
        if x not in seen:
            seen.append(x)
    return tuple(seen)


def compose(a1: DurativeAction, a2: DurativeAction, name: Optional[str] = None,
            args: Optional[Sequence[str]] = None) -> CompositionOutcome:
    """Right-associative composition ``a1 ▷ a2``.

    ``a1`` must be an ordinary action; ``a2`` may itself be a macro.
    """
    for a in (a1, a2):
        report = validate_action(a)
        if not report.ok:
            raise IllFormedAction(a, [str(v) for v in report.violations])
    if a1.is_macro:
        raise CompositionError(
            f"left operand {a1.label()} is a macro; compose from the right instead")

    ab = Abbreviations.of(a1, a2)

    pre_s = (a1.pre_s
             | ((ab.pre1 & ab.del12) - a1.eff_s_add)
             | ((a2.pre_s & a2.eff_s_del) - ab.add1))
    pre_inv = ((ab.pre1 - (ab.del12 - a1.eff_s_del))
               | (a2.pre_s - (a1.eff_e_add | (a2.eff_s_del - ab.del1)))
               | (a2.pre_inv - ab.add12))
    pre_e = a2.pre_e - ab.add12
    # positive start effects of a1 on atoms in del12 are overridden; the
    # negative ones coincide with the forwarded deletions below
    eff_s = (frozenset(l for l in a1.eff_s if not (l.positive and l.atom in ab.del12))
             | frozenset(Literal(v, False) for v in ab.del12))
    eff_e = a2.eff_e | frozenset(Literal(v, True) for v in ab.add12 - ab.del2)

    failures = []
    clash = frozenset(l.atom for l in eff_s if not l.positive) & pre_inv
    if clash:
        failures.append((UndefinedReason.INVARIANT_DELETED_AT_START, clash))
    falsified = (a2.pre_e & ab.del12) - a2.eff_s_add
    if falsified:
        failures.append((UndefinedReason.END_PRE_FALSIFIED_INSIDE, falsified))
    if failures:
        (reason, witnesses), *rest = failures
        return Undefined(reason, witnesses, 0, tuple(rest))

    macro = DurativeAction(
        name=name if name is not None else f"{a1.name}-{a2.name}",
        dur=a1.dur + a2.dur,
        pre_s=pre_s,
        pre_inv=pre_inv,
        pre_e=pre_e,
        eff_s=eff_s,
        eff_e=eff_e,
        args=tuple(args) if args is not None else _default_args(a1, a2),
        left=a1,
        right=a2,
        mutex=mutex_atoms(a1, a2, pre_inv),
    )
    return Defined(macro)


def compose_seq(actions: Sequence[DurativeAction], name: Optional[str] = None,
                args: Optional[Sequence[str]] = None) -> CompositionOutcome:
    """Fold ``a1 ▷ (a2 ▷ (... ▷ an))`` from the right.

    ``name``/``args`` label the outermost macro; inner macros get derived names.
    """
    if len(actions) < 2:
        raise TooShort(f"need at least two actions to compose, got {len(actions)}")
    acc = actions[-1]
    for i in range(len(actions) - 2, -1, -1):
        outer = i == 0
        outcome = compose(actions[i], acc,
                          name=name if outer else None,
                          args=args if outer else None)
        if isinstance(outcome, Undefined):
            return Undefined(outcome.reason, outcome.witnesses, i, outcome.also)
        acc = outcome.macro
    return Defined(acc)
