"""Compose action schemas into macro schemas at the first-order level.

Steps are renamed to the recipe's terms and composed with the grounded
composer, treating distinct variables as distinct objects. Because equal
objects may collapse sets, every grounding of the result is cross-checked
against the composition of its grounded constituents; the report lists the
groundings that fail that check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..composer import Undefined, compose_seq
from ..errors import IllFormedAction, RecipeError, UndefinedForAllGroundings
from .domain import LiftedDomain, LiftedSchema, Problem, ROOT_TYPE, is_variable, objects_by_name
from .grounding import Exclusion, check_macro_grounding, groundings, substitute


@dataclass(frozen=True)
class RecipeStep:
    schema: str
    terms: tuple[str, ...]

    def __str__(self):
        return f"({self.schema}{''.join(' ' + t for t in self.terms)})"


@dataclass(frozen=True)
class MacroRecipe:
    name: str
    steps: tuple[RecipeStep, ...]

    def __post_init__(self):
        if len(self.steps) < 2:
            raise RecipeError(f"macro {self.name} needs at least two steps")

    def __str__(self):
        return f"macro {self.name} = " + " ; ".join(str(s) for s in self.steps)


@dataclass
class LiftReport:
    macro: str
    checked: int = 0
    admitted: int = 0
    excluded: list[Exclusion] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"{self.macro}: {self.admitted}/{self.checked} groundings match the grounded composition"]
        out.extend(f"  excluded {e}" for e in self.excluded)
        return out


def _reconcile(dom: LiftedDomain, name: str, var: str, current: Optional[str], new: str) -> str:
    if current is None or dom.is_subtype(new, current):
        return new
    if dom.is_subtype(current, new):
        return current
    raise RecipeError(f"macro {name}: {var} is used both as {current} and as {new}")


def _macro_params(dom: LiftedDomain, recipe: MacroRecipe, constants: dict[str, str]):
    order, types = [], {}
    for step in recipe.steps:
        schema = dom.schema(step.schema)
        if schema.is_macro:
            raise RecipeError(f"macro {recipe.name}: step {step} is itself a macro schema")
        if len(step.terms) != len(schema.params):
            raise RecipeError(f"macro {recipe.name}: {step.schema} takes {len(schema.params)} "
                              f"arguments, got {len(step.terms)}")
        for term, (_, t) in zip(step.terms, schema.params):
            if is_variable(term):
                if term not in types:
                    order.append(term)
                types[term] = _reconcile(dom, recipe.name, term, types.get(term), t)
            else:
                if term not in constants:
                    raise RecipeError(f"macro {recipe.name}: {term} is neither a variable nor a constant")
                if not dom.is_subtype(constants[term], t):
                    raise RecipeError(f"macro {recipe.name}: constant {term} is not a {t}")
    return tuple((v, types.get(v, ROOT_TYPE)) for v in order)


def lift_compose(dom: LiftedDomain, recipe: MacroRecipe,
                 prob: Optional[Problem] = None) -> tuple[LiftedSchema, LiftReport]:
    """Build the macro schema for ``recipe``; with ``prob``, check every grounding."""
    constants = dict(dom.constants)
    params = _macro_params(dom, recipe, constants)
    steps = []
    for step in recipe.steps:
        schema = dom.schema(step.schema)
        sigma = dict(zip(schema.variables, step.terms))
        steps.append(substitute(schema.template, sigma))
    try:
        outcome = compose_seq(steps, name=recipe.name, args=tuple(v for v, _ in params))
    except IllFormedAction as exc:
        raise RecipeError(f"macro {recipe.name}: {exc}") from exc
    if isinstance(outcome, Undefined):
        raise UndefinedForAllGroundings(recipe.name, f"symbolic composition {outcome}")
    schema = LiftedSchema(params, outcome.macro)
    report = LiftReport(recipe.name)
    if prob is not None:
        table = objects_by_name(dom, prob)
        for sigma in groundings(dom, schema, table):
            report.checked += 1
            action, reason = check_macro_grounding(schema, sigma)
            if action is None:
                report.excluded.append(Exclusion(recipe.name, tuple(sigma[v] for v in schema.variables), reason))
            else:
                report.admitted += 1
        if report.checked and not report.admitted:
            raise UndefinedForAllGroundings(recipe.name, "every grounding is excluded")
    return schema, report


def add_macros(dom: LiftedDomain, recipes, prob: Optional[Problem] = None):
    """Domain extended by one schema per recipe, plus the lift reports."""
    names = {s.name for s in dom.schemas}
    macros, reports = [], []
    for recipe in recipes:
        if recipe.name in names:
            raise RecipeError(f"macro name {recipe.name} clashes with an existing schema")
        names.add(recipe.name)
        schema, report = lift_compose(dom, recipe, prob)
        macros.append(schema)
        reports.append(report)
    return dom.with_schemas(dom.schemas + tuple(macros)), reports


def attach_macros(dom: LiftedDomain, recipes) -> tuple[LiftedDomain, LiftedDomain]:
    """Recover macro structure for a domain whose macro schemas were printed flat.

    Returns ``(base, full)``: the domain without the recipe schemas, and the
    domain where each recipe schema carries its macro tree. Printed macro
    schemas must agree with the recomputed ones.
    """
    recipes = list(recipes)
    recipe_names = {r.name for r in recipes}
    base = dom.with_schemas(s for s in dom.schemas if s.name not in recipe_names)
    full, _ = add_macros(base, recipes)
    by_name = {s.name: s for s in full.schemas}
    for s in dom.schemas:
        if s.name in recipe_names and s.flat() != by_name[s.name].flat():
            raise RecipeError(f"schema {s.name} in the domain does not match its recipe")
    missing = [r.name for r in recipes if r.name not in {s.name for s in dom.schemas}]
    order = [s.name for s in dom.schemas] + missing
    return base, full.with_schemas(by_name[n] for n in order)
