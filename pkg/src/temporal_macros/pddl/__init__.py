"""Reading and writing the supported PDDL subset, grounding, and lifted macros."""

from .closure import floyd_warshall, shortest_path_closure
from .config import Config, MoveSpec, emit_manifest, parse_config
from .domain import LiftedDomain, LiftedSchema, Problem, emit_domain, emit_problem, parse_domain, parse_problem
from .grounded import emit_grounded, grounded_domain
from .grounding import GroundingReport, ground, ground_detailed, substitute
from .lifting import LiftReport, MacroRecipe, RecipeStep, add_macros, attach_macros, lift_compose
from .plans import action_index, emit_plan, mangled_name, parse_plan

__all__ = [
    "Config", "GroundingReport", "LiftReport", "LiftedDomain", "LiftedSchema", "MacroRecipe",
    "MoveSpec", "Problem", "RecipeStep", "action_index", "add_macros", "attach_macros",
    "emit_domain", "emit_grounded", "emit_manifest", "emit_plan", "emit_problem", "floyd_warshall",
    "ground", "ground_detailed", "grounded_domain", "lift_compose", "mangled_name", "parse_config",
    "parse_domain", "parse_plan", "parse_problem", "shortest_path_closure", "substitute",
]
