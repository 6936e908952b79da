"""Print a grounded task as a PDDL domain/problem pair.

Every ground action becomes a parameterless schema named
``name__arg1__arg2``; objects become domain constants.
"""

from __future__ import annotations

from ..model import DurativeAction, PlanningTask
from .domain import LiftedDomain, LiftedSchema, Problem, ROOT_TYPE, emit_domain, emit_problem
from .plans import mangled_name


def grounded_domain(task: PlanningTask, name: str) -> LiftedDomain:
    arity, objects = {}, set()
    for v in task.atoms:
        arity.setdefault(v.predicate, len(v.args))
        objects.update(v.args)
    predicates = tuple(
        (p, tuple((f"?x{i}", ROOT_TYPE) for i in range(1, arity[p] + 1))) for p in sorted(arity))
    schemas = []
    for a in task.sorted_actions():
        flat = DurativeAction(mangled_name(a), a.dur, a.pre_s, a.pre_inv, a.pre_e, a.eff_s, a.eff_e)
        schemas.append(LiftedSchema((), flat))
    return LiftedDomain(name, (":durative-actions",), (), tuple((o, ROOT_TYPE) for o in sorted(objects)),
                        predicates, tuple(schemas))


def emit_grounded(task: PlanningTask, domain_name: str, problem_name: str) -> tuple[str, str]:
    dom = grounded_domain(task, domain_name)
    prob = Problem(problem_name, domain_name, (), task.init, task.goal)
    return emit_domain(dom), emit_problem(prob, dom)
