"""Instantiate lifted schemas over the objects of a problem."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Optional

from ..composer import Undefined, compose_seq
from ..errors import GroundingError
from ..model import Atom, DurativeAction, Literal, MutexAtom, PlanningTask, validate_action
from .domain import LiftedDomain, LiftedSchema, Problem, is_variable, objects_by_name

log = logging.getLogger(__name__)


def _term(x: str, sigma: dict) -> str:
    return sigma.get(x, x) if is_variable(x) else x


def _atom(a: Atom, sigma) -> Atom:
    return Atom(a.predicate, tuple(_term(x, sigma) for x in a.args))


def _dedup(xs):
    out = []
    for x in xs:
        if x not in out:
            out.append(x)
    return tuple(out)


def substitute(a: DurativeAction, sigma: dict, top: bool = True) -> DurativeAction:
    """Apply a variable substitution to an action and, for macros, its whole tree.

    Inner macros label themselves with the ordered union of their
    constituents' arguments, so their substituted argument lists are
    de-duplicated; the outermost keeps one argument per parameter.
    """
    atoms = lambda xs: frozenset(_atom(v, sigma) for v in xs)  # noqa: E731
    lits = lambda xs: frozenset(Literal(_atom(l.atom, sigma), l.positive) for l in xs)  # noqa: E731
    args = tuple(_term(x, sigma) for x in a.args)
    left = right = None
    if a.is_macro:
        left = substitute(a.left, sigma, top=False)
        right = substitute(a.right, sigma, top=False)
        if not top:
            args = _dedup(args)
    return DurativeAction(
        a.name, a.dur, atoms(a.pre_s), atoms(a.pre_inv), atoms(a.pre_e),
        lits(a.eff_s), lits(a.eff_e), args, left, right,
        frozenset(MutexAtom(m.guard, _atom(m.atom, sigma)) for m in a.mutex),
    )


@dataclass(frozen=True)
class Exclusion:
    schema: str
    args: tuple[str, ...]
    reason: str

    def __str__(self):
        return f"({self.schema}{''.join(' ' + x for x in self.args)}): {self.reason}"


@dataclass
class GroundingReport:
    excluded: list[Exclusion] = field(default_factory=list)
    counts: dict = field(default_factory=dict)  # schema name -> ground actions kept


def objects_of_type(dom: LiftedDomain, table: dict[str, str], t: str) -> list[str]:
    return sorted(o for o, ot in table.items() if dom.is_subtype(ot, t))


def groundings(dom: LiftedDomain, schema: LiftedSchema, table: dict[str, str]):
    pools = [objects_of_type(dom, table, t) for _, t in schema.params]
    for combo in itertools.product(*pools):
        yield dict(zip(schema.variables, combo))


def check_macro_grounding(schema: LiftedSchema, sigma: dict):
    """Ground a macro schema and cross-check it against the grounded composer.

    Returns ``(action, None)`` when both agree, else ``(None, reason)``.
    """
    candidate = substitute(schema.template, sigma)
    steps = candidate.constituents()
    for step in steps:
        report = validate_action(step)
        if not report.ok:
            return None, f"constituent {step.label()} ill-formed: " + "; ".join(str(v) for v in report.violations)
    outcome = compose_seq(steps, name=candidate.name, args=candidate.args)
    if isinstance(outcome, Undefined):
        return None, f"composition {outcome}"
    if outcome.macro != candidate:
        return None, "lifted macro differs from the grounded composition"
    return candidate, None


def _ground_schema(dom, schema, table, report):
    template = schema.template
    if not schema.is_macro:
        symbolic = validate_action(template)
        if not symbolic.ok:
            raise GroundingError(f"schema {schema.name} is ill-formed for every grounding: "
                                 + "; ".join(str(v) for v in symbolic.violations))
    kept = []
    for sigma in groundings(dom, schema, table):
        if schema.is_macro:
            action, reason = check_macro_grounding(schema, sigma)
        else:
            action = substitute(template, sigma)
            check = validate_action(action)
            reason = None
            if not check.ok:
                action, reason = None, "aliasing makes it ill-formed: " + "; ".join(str(v) for v in check.violations)
        if action is None:
            excl = Exclusion(schema.name, tuple(sigma[v] for v in schema.variables), reason)
            report.excluded.append(excl)
            log.warning("excluded ground action %s", excl)
        else:
            kept.append(action)
    report.counts[schema.name] = len(kept)
    return kept


def all_ground_atoms(dom: LiftedDomain, table: dict[str, str]) -> set[Atom]:
    out = set()
    for pred, params in dom.predicates:
        pools = [objects_of_type(dom, table, t) for _, t in params]
        out.update(Atom(pred, combo) for combo in itertools.product(*pools))
    return out


def ground_detailed(dom: LiftedDomain, prob: Problem,
                    schemas: Optional[list[LiftedSchema]] = None) -> tuple[PlanningTask, GroundingReport]:
    table = objects_by_name(dom, prob)
    report = GroundingReport()
    actions = []
    for schema in (dom.schemas if schemas is None else schemas):
        actions.extend(_ground_schema(dom, schema, table, report))
    atoms = all_ground_atoms(dom, table) | prob.init | prob.goal
    for a in actions:
        atoms |= a.atoms()
    names = {}
    for a in actions:
        key = (a.name, a.args)
        if key in names:
            raise GroundingError(f"two ground actions named {a.label()}")
        names[key] = a
    return PlanningTask(frozenset(atoms), frozenset(actions), prob.init, prob.goal), report


def ground(dom: LiftedDomain, prob: Problem) -> PlanningTask:
    return ground_detailed(dom, prob)[0]
