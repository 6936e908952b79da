"""Plan files: ``T: (name args...) [D]`` per line, ``;`` starts a comment."""

from __future__ import annotations

import re
from typing import Iterable

from ..errors import DurationMismatch, ParseError, UnknownAction
from ..model import DurativeAction, Plan, TimedAction, to_rational
from .domain import format_number

_LINE = re.compile(
    r"^\s*(?P<t>[^\s:]+)\s*:\s*\((?P<body>[^()]*)\)\s*(?:\[\s*(?P<d>[^\]\s]+)\s*\])?\s*$")

MANGLE_SEPARATOR = "__"


def mangled_name(a: DurativeAction) -> str:
    """Name of ``a`` as a parameterless action: ``name__arg1__arg2``."""
    return MANGLE_SEPARATOR.join((a.name,) + a.args)


def action_index(actions: Iterable[DurativeAction]) -> dict:
    """Lookup table by ``(name, args)`` and by mangled name."""
    index = {}
    for a in actions:
        index[(a.name, a.args)] = a
        index.setdefault((mangled_name(a), ()), a)
    return index


def parse_plan(text: str, actions) -> Plan:
    """Parse a plan whose steps must be among ``actions`` (or an index from :func:`action_index`)."""
    index = actions if isinstance(actions, dict) else action_index(actions)
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split(";", 1)[0]
        if not line.strip():
            continue
        m = _LINE.match(line)
        if m is None:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError(f"malformed plan line {raw.strip()!r}", lineno, col,
                             "T: (name args...) [D]")
        try:
            t = to_rational(m.group("t"))
        except ValueError:
            raise ParseError(f"bad time {m.group('t')!r}", lineno, m.start("t") + 1) from None
        parts = m.group("body").lower().split()
        if not parts:
            raise ParseError("empty action", lineno, m.start("body") + 1, "an action name")
        key = (parts[0], tuple(parts[1:]))
        action = index.get(key)
        if action is None:
            raise UnknownAction(f"line {lineno}: ({' '.join(parts)}) is not a known ground action")
        if m.group("d") is not None:
            try:
                d = to_rational(m.group("d"))
            except ValueError:
                raise ParseError(f"bad duration {m.group('d')!r}", lineno, m.start("d") + 1) from None
            if d != action.dur:
                raise DurationMismatch(f"line {lineno}: {action.label()} lasts {action.dur}, plan says {d}")
        if t <= 0:
            raise ParseError(f"start time must be positive, got {m.group('t')}", lineno, m.start("t") + 1)
        steps.append(TimedAction(t, action))
    return Plan(steps)


def emit_plan(plan: Plan, mangle: bool = False) -> str:
    lines = []
    for s in plan.sorted():
        a = s.action
        label = f"({mangled_name(a)})" if mangle else a.label()
        lines.append(f"{format_number(s.t)}: {label} [{format_number(a.dur)}]")
    return "\n".join(lines) + ("\n" if lines else "")
