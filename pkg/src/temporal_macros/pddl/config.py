"""Line-oriented configuration shared by macro recipes, manifests and edge tables.

::

    # comments start with '#'
    macro move-get = (move ?r ?from ?to) ; (get ?r ?to)
    mutex move-get = (can-del-at ?r ?to) (can-add-free ?to)
    move-schema move ?from ?to
    edge-predicate road
    edge l1 l2 = 3/2
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..errors import ConfigError
from ..model import Atom, to_rational
from .domain import LiftedSchema
from .lifting import MacroRecipe, RecipeStep

_STEP = re.compile(r"^\(\s*([^()\s]+)((?:\s+[^()\s]+)*)\s*\)$")


@dataclass(frozen=True)
class MoveSpec:
    schema: str
    from_param: str
    to_param: str


@dataclass
class Config:
    recipes: list[MacroRecipe] = field(default_factory=list)
    mutex: dict[str, list[Atom]] = field(default_factory=dict)
    move: Optional[MoveSpec] = None
    edge_predicate: Optional[str] = None
    edges: dict[tuple[str, str], Fraction] = field(default_factory=dict)


def _step(text: str, lineno: int) -> RecipeStep:
    m = _STEP.match(text.strip())
    if m is None:
        raise ConfigError(f"line {lineno}: malformed step {text.strip()!r}, expected (schema term ...)")
    return RecipeStep(m.group(1), tuple(m.group(2).split()))


def parse_config(text: str) -> Config:
    cfg = Config()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip().lower()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword in ("macro", "mutex", "edge"):
            lhs, eq, rhs = rest.partition("=")
            if not eq:
                raise ConfigError(f"line {lineno}: expected '=' in {keyword} line")
            lhs, rhs = lhs.strip(), rhs.strip()
        if keyword == "macro":
            if not lhs or " " in lhs:
                raise ConfigError(f"line {lineno}: expected a single macro name")
            if any(r.name == lhs for r in cfg.recipes):
                raise ConfigError(f"line {lineno}: macro {lhs} defined twice")
            steps = tuple(_step(s, lineno) for s in rhs.split(";"))
            cfg.recipes.append(MacroRecipe(lhs, steps))
        elif keyword == "mutex":
            cfg.mutex[lhs] = [Atom.parse(a) for a in re.findall(r"\([^()]*\)", rhs)]
        elif keyword == "move-schema":
            parts = rest.split()
            if len(parts) != 3:
                raise ConfigError(f"line {lineno}: expected 'move-schema <schema> ?from ?to'")
            cfg.move = MoveSpec(*parts)
        elif keyword == "edge-predicate":
            if not rest or " " in rest:
                raise ConfigError(f"line {lineno}: expected a single predicate name")
            cfg.edge_predicate = rest
        elif keyword == "edge":
            ends = lhs.split()
            if len(ends) != 2:
                raise ConfigError(f"line {lineno}: expected 'edge <from> <to> = <duration>'")
            try:
                weight = to_rational(rhs)
            except ValueError:
                raise ConfigError(f"line {lineno}: bad duration {rhs!r}") from None
            if weight <= 0:
                raise ConfigError(f"line {lineno}: edge durations must be positive")
            cfg.edges[(ends[0], ends[1])] = weight
        else:
            raise ConfigError(f"line {lineno}: unknown keyword {keyword!r}")
    return cfg


def emit_manifest(recipes, schemas: list[LiftedSchema]) -> str:
    """Recipes followed by the (lifted) mutex atoms of each composed schema."""
    by_name = {s.name: s for s in schemas}
    lines = []
    for r in recipes:
        lines.append(str(r))
        schema = by_name.get(r.name)
        if schema is not None:
            locks = " ".join(str(m) for m in sorted(schema.template.mutex))
            lines.append(f"mutex {r.name} = {locks}".rstrip())
    return "\n".join(lines) + "\n"
