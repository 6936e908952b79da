"""Command-line front end.

Exit codes: 0 success / plan solves, 1 plan is not a solution or no plan
found, 2 bad input, 3 a refined plan failed certification.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path

from .effect_safe import base_plan, build_effect_safe
from .errors import CertificationFailure, MacroError, NotASolution, ShapeViolation
from .model import PlanningTask
from .pddl import (
    action_index,
    add_macros,
    attach_macros,
    emit_domain,
    emit_grounded,
    emit_manifest,
    emit_plan,
    emit_problem,
    ground_detailed,
    parse_config,
    parse_domain,
    parse_plan,
    parse_problem,
    shortest_path_closure,
)
from .planner import BudgetExceeded, SearchLimits, Solved, solve
from .refinement import refine_all
from .semantics import check_plan, trace_to_json, trace_to_text

log = logging.getLogger("temporal_macros")

OK, NOT_SOLVED, INPUT_ERROR, CERTIFICATION_FAILED = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path, text: str):
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _say(msg: str):
    print(msg, file=sys.stderr)


def _load(domain_path, problem_path=None, manifest=None):
    """Return (base domain, full domain with macro trees, problem)."""
    dom = parse_domain(_read(domain_path))
    base = full = dom
    if manifest is not None:
        recipes = parse_config(_read(manifest)).recipes
        base, full = attach_macros(dom, recipes)
    prob = parse_problem(_read(problem_path), dom) if problem_path is not None else None
    return base, full, prob


def _ground(dom, prob):
    task, report = ground_detailed(dom, prob)
    for e in report.excluded:
        _say(f"note: excluded ground action {e}")
    return task


# ---------------------------------------------------------------- commands

def cmd_compose(args) -> int:
    dom = parse_domain(_read(args.domain))
    cfg = parse_config(_read(args.config))
    prob = parse_problem(_read(args.problem), dom) if args.problem else None
    full, reports = add_macros(dom, cfg.recipes, prob)
    for r in reports:
        for line in r.lines():
            _say(line)
    _write(args.output, emit_domain(full))
    if args.manifest:
        _write(args.manifest, emit_manifest(cfg.recipes, list(full.schemas)))
    return OK


def cmd_transform(args) -> int:
    _, full, prob = _load(args.domain, args.problem, args.manifest)
    est = build_effect_safe(_ground(full, prob))
    dom_text, prob_text = emit_grounded(est.task, f"{full.name}-effect-safe", f"{prob.name}-effect-safe")
    _write(args.output, dom_text)
    _write(args.problem_out, prob_text)
    return OK


def cmd_ground(args) -> int:
    _, full, prob = _load(args.domain, args.problem, args.manifest)
    task = _ground(full, prob)
    dom_text, prob_text = emit_grounded(task, f"{full.name}-ground", f"{prob.name}-ground")
    _write(args.output, dom_text)
    _write(args.problem_out, prob_text)
    return OK


def _validate_one(domain, problem, plan_path, manifest):
    """Validate one plan; returns (exit code, message lines, trace or None)."""
    _, full, prob = _load(domain, problem, manifest)
    task, _ = ground_detailed(full, prob)
    plan = parse_plan(_read(plan_path), action_index(task.actions))
    try:
        report = check_plan(task, plan)
    except ShapeViolation as exc:
        return INPUT_ERROR, [f"{plan_path}: {c}" for c in exc.clashes], None
    if report.solves:
        return OK, [f"{plan_path}: solves (makespan {plan.makespan})"], report.trace
    return NOT_SOLVED, [f"{plan_path}: not a solution"] + [f"  {v}" for v in report.violations], report.trace


def _validate_job(job):
    domain, problem, plan_path, manifest, as_json = job
    try:
        code, lines, trace = _validate_one(domain, problem, plan_path, manifest)
    except (MacroError, InputError) as exc:
        return INPUT_ERROR, [f"{plan_path}: {exc}"], None
    if trace is None:
        return code, lines, None
    return code, lines, trace_to_json(trace) if as_json else trace_to_text(trace)


def cmd_validate(args) -> int:
    pairs = args.pairs
    if len(pairs) % 2:
        raise InputError("validate expects PROBLEM PLAN pairs")
    as_json = bool(args.trace) and args.trace.endswith(".json")
    jobs = [(args.domain, pairs[i], pairs[i + 1], args.manifest, as_json)
            for i in range(0, len(pairs), 2)]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_validate_job, jobs))
    else:
        results = [_validate_job(job) for job in jobs]
    worst = OK
    traces = []
    for code, lines, trace in results:
        for line in lines:
            _say(line)
        worst = max(worst, code)
        if trace is not None:
            traces.append(trace)
    if args.trace and traces:
        _write(args.trace, traces[-1])
    return worst


def _refine(full, base, prob, plan, audit_lines):
    """Base plan -> macro-free plan, re-validated on the original domain."""
    task = _ground(full, prob)
    audit = []
    refined = refine_all(plan, task, audit=audit)
    audit_lines.extend(str(step) for step in audit)
    original, _ = ground_detailed(base, prob)
    missing = refined.actions() - original.actions
    if missing:
        raise CertificationFailure("refined plan uses actions outside the original domain: "
                                   + ", ".join(a.label() for a in missing))
    report = check_plan(original, refined)
    if not report.solves:
        raise CertificationFailure("refined plan fails on the original domain: "
                                   + "; ".join(str(v) for v in report.violations), report)
    return refined


def cmd_refine(args) -> int:
    base, full, prob = _load(args.domain, args.problem, args.manifest)
    task = _ground(full, prob)
    est = build_effect_safe(task)
    plan_hat = parse_plan(_read(args.plan), action_index(est.task.actions))
    plan = base_plan(plan_hat, est)
    audit = []
    refined = _refine(full, base, prob, plan, audit)
    if args.audit:
        _write(args.audit, "\n".join(audit) + ("\n" if audit else ""))
    _write(args.output, emit_plan(refined))
    _say(f"refined {len(audit)} macro step(s); certified on the original domain")
    return OK


def _limits(args) -> SearchLimits:
    try:
        return SearchLimits.parse(args.limits or "")
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad --limits: {exc}") from None


def _plan(task: PlanningTask, limits: SearchLimits, effect_safe: bool):
    if effect_safe:
        est = build_effect_safe(task)
        result = solve(est.task, limits)
        if isinstance(result, Solved):
            return Solved(base_plan(result.plan, est), result.nodes)
        return result
    return solve(task, limits)


def _report_unsolved(result):
    if isinstance(result, BudgetExceeded):
        _say(f"no plan found: node budget exhausted after {result.nodes} nodes")
    else:
        _say(f"no plan exists within the limits ({result.nodes} nodes searched)")


def cmd_plan(args) -> int:
    _, full, prob = _load(args.domain, args.problem, args.manifest)
    result = _plan(_ground(full, prob), _limits(args), args.effect_safe)
    if not isinstance(result, Solved):
        _report_unsolved(result)
        return NOT_SOLVED
    _write(args.output, emit_plan(result.plan))
    return OK


def cmd_shortest_paths(args) -> int:
    dom = parse_domain(_read(args.domain))
    prob = parse_problem(_read(args.problem), dom)
    cfg = parse_config(_read(args.config))
    if cfg.move is None or cfg.edge_predicate is None:
        raise InputError("configuration needs 'move-schema' and 'edge-predicate' lines")
    out_dom, out_prob, dist = shortest_path_closure(dom, prob, cfg.move, cfg.edge_predicate, cfg.edges)
    _say(f"{len(dist)} reachable location pairs, "
         f"{len([s for s in out_dom.schemas if s.name.startswith(cfg.move.schema + '-sp')])} move classes")
    _write(args.output, emit_domain(out_dom))
    _write(args.problem_out, emit_problem(out_prob, out_dom))
    return OK


def _bundled(name: str) -> Path:
    return Path(str(resources.files("temporal_macros") / "data" / "robot" / name))


def cmd_pipeline(args) -> int:
    domain = args.domain or _bundled("domain.pddl")
    problem = args.problem or _bundled("problem.pddl")
    config = args.config or _bundled("macros.cfg")
    base = parse_domain(_read(domain))
    prob = parse_problem(_read(problem), base)
    cfg = parse_config(_read(config))
    full, reports = add_macros(base, cfg.recipes, prob)
    for r in reports:
        for line in r.lines():
            _say(line)
    result = _plan(_ground(full, prob), _limits(args), effect_safe=True)
    if not isinstance(result, Solved):
        _report_unsolved(result)
        return NOT_SOLVED
    _say("plan with macros:")
    for line in emit_plan(result.plan).splitlines():
        _say(f"  {line}")
    audit = []
    refined = _refine(full, base, prob, result.plan, audit)
    for line in audit:
        _say(line)
    _say("macro-free plan certified on the original domain")
    _write(args.output, emit_plan(refined))
    return OK


# ---------------------------------------------------------------- wiring

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tmacro", description="Temporal macro-actions toolkit.")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging on stderr")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compose", help="add macro schemas from recipes to a domain")
    c.add_argument("domain")
    c.add_argument("config")
    c.add_argument("--problem", help="check every grounding of each macro over this problem")
    c.add_argument("-o", "--output")
    c.add_argument("--manifest", help="write recipes and mutex atoms here")
    c.set_defaults(run=cmd_compose)

    for name, func, text in (("transform", cmd_transform, "emit the grounded effect-safe task"),
                             ("ground", cmd_ground, "emit the grounded task")):
        c = sub.add_parser(name, help=text)
        c.add_argument("domain")
        c.add_argument("problem")
        c.add_argument("--manifest")
        c.add_argument("-o", "--output", help="domain output")
        c.add_argument("--problem-out", help="problem output")
        c.set_defaults(run=func)

    c = sub.add_parser("validate", help="check plans against problems")
    c.add_argument("domain")
    c.add_argument("pairs", nargs="+", metavar="PROBLEM PLAN")
    c.add_argument("--manifest")
    c.add_argument("--trace", help="write the trace of the last plan (.json for JSON)")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(run=cmd_validate)

    c = sub.add_parser("refine", help="unfold macros of an effect-safe plan")
    c.add_argument("domain")
    c.add_argument("problem")
    c.add_argument("plan")
    c.add_argument("--manifest", required=True)
    c.add_argument("--audit", help="write one line per refinement step")
    c.add_argument("-o", "--output")
    c.set_defaults(run=cmd_refine)

    c = sub.add_parser("plan", help="search for a plan")
    c.add_argument("domain")
    c.add_argument("problem")
    c.add_argument("--manifest")
    c.add_argument("--limits", help="steps=K,horizon=Q,eps=Q,budget=N")
    c.add_argument("--effect-safe", action="store_true", help="plan on the effect-safe task")
    c.add_argument("-o", "--output")
    c.set_defaults(run=cmd_plan)

    c = sub.add_parser("shortest-paths", help="direct moves along shortest paths")
    c.add_argument("domain")
    c.add_argument("problem")
    c.add_argument("config")
    c.add_argument("-o", "--output")
    c.add_argument("--problem-out")
    c.set_defaults(run=cmd_shortest_paths)

    c = sub.add_parser("pipeline", help="compose, transform, plan, refine and validate")
    c.add_argument("domain", nargs="?")
    c.add_argument("problem", nargs="?")
    c.add_argument("config", nargs="?")
    c.add_argument("--limits")
    c.add_argument("-o", "--output")
    c.set_defaults(run=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else INPUT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.run(args)
    except CertificationFailure as exc:
        _say(f"certification failed: {exc}")
        return CERTIFICATION_FAILED
    except NotASolution as exc:
        _say(str(exc))
        return NOT_SOLVED
    except ShapeViolation as exc:
        _say(str(exc))
        return INPUT_ERROR
    except (MacroError, InputError) as exc:
        _say(f"error: {exc}")
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
