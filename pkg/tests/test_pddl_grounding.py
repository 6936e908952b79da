from fractions import Fraction

import pytest

from temporal_macros.composer import Defined, compose, compose_seq
from temporal_macros.effect_safe import build_effect_safe
from temporal_macros.errors import (
    ConfigError, DurationMismatch, GroundingError, ParseError, RecipeError, UndefinedForAllGroundings,
    UnknownAction, UnknownSchema,
)
from temporal_macros.model import Atom, Plan, TimedAction
from temporal_macros.pddl import (
    MacroRecipe, RecipeStep, action_index, add_macros, attach_macros, emit_domain, emit_grounded,
    emit_manifest, emit_plan, ground, ground_detailed, lift_compose, parse_config, parse_domain,
    parse_plan, parse_problem,
)
from temporal_macros.pddl.domain import objects_by_name
from temporal_macros.pddl.grounding import groundings, substitute

from pddl_texts import ROBOT_DOMAIN, ROBOT_MACROS, ROBOT_PROBLEM, minimal_domain, robots_problem
from support import get, move, move_get


@pytest.fixture
def robot():
    dom = parse_domain(ROBOT_DOMAIN)
    return dom, parse_problem(ROBOT_PROBLEM, dom)


def recipe(text):
    return parse_config(text).recipes[0]


# ------------------------------------------------------------ grounding

def untyped(n_objects):
    dom = parse_domain(minimal_domain(
        ":duration (= ?duration 1) :condition (at start (e ?x ?y)) :effect (at end (p ?y))"))
    objs = " ".join(f"o{i}" for i in range(n_objects))
    prob = parse_problem(f"(define (problem p) (:domain tiny) (:objects {objs}) (:init) (:goal (and)))", dom)
    return dom, prob


def test_untyped_schema_grounds_over_all_tuples():
    task = ground(*untyped(3))
    assert len(task.actions) == 9


def test_no_objects_no_actions():
    task = ground(*untyped(0))
    assert task.actions == frozenset()


def test_robot_grounding(robot):
    task, report = ground_detailed(*robot)
    # move: 1 robot x 2 x 2 locations, get: 2 locations
    assert report.counts == {"move": 4, "get": 2}
    assert move() in task.actions and get() in task.actions
    assert report.excluded == []


def test_aliasing_exclusions_are_reported(robot, caplog):
    dom, prob = robot
    full, _ = add_macros(dom, parse_config(ROBOT_MACROS).recipes)
    task, report = ground_detailed(full, prob)
    excluded = {(e.schema, e.args) for e in report.excluded}
    assert excluded == {("move-get", ("r", "l1", "l1")), ("move-get", ("r", "l2", "l2"))}
    assert report.counts["move-get"] == 2
    assert "excluded ground action" in caplog.text
    assert move_get() in task.actions


def test_aliasing_can_make_an_ordinary_action_ill_formed():
    dom = parse_domain(minimal_domain(
        ":duration (= ?duration 1) :condition (over all (p ?x)) :effect (at start (not (p ?y)))"))
    prob = parse_problem("(define (problem p) (:domain tiny) (:objects a b) (:init) (:goal (and (p a))))", dom)
    task, report = ground_detailed(dom, prob)
    assert len(task.actions) == 2
    assert {e.args for e in report.excluded} == {("a", "a"), ("b", "b")}


def test_schema_ill_formed_for_every_grounding():
    dom = parse_domain(minimal_domain(
        ":duration (= ?duration 1) :condition (over all (p ?x)) :effect (at start (not (p ?x)))"))
    prob = parse_problem("(define (problem p) (:domain tiny) (:objects a) (:init) (:goal (and (p a))))", dom)
    with pytest.raises(GroundingError):
        ground(dom, prob)


# ------------------------------------------------------------ lifting

def test_lifted_robot_macro_matches_grounded_composition(robot):
    dom, prob = robot
    schema, report = lift_compose(dom, recipe(ROBOT_MACROS), prob)
    assert schema.params == (("?r", "robot"), ("?from", "location"), ("?to", "location"))
    assert schema.dur == 3
    assert (report.checked, report.admitted) == (4, 2)
    grounded = substitute(schema.template, {"?r": "r", "?from": "l1", "?to": "l2"})
    assert grounded == move_get()


def test_lifted_macro_over_many_objects():
    dom = parse_domain(ROBOT_DOMAIN)
    prob = parse_problem(robots_problem(3, 4), dom)
    schema, report = lift_compose(dom, recipe(ROBOT_MACROS), prob)
    assert report.checked == 3 * 4 * 4
    assert report.admitted == 3 * 4 * 3
    table = objects_by_name(dom, prob)
    for sigma in groundings(dom, schema, table):
        if sigma["?from"] == sigma["?to"]:
            continue
        m = dom.schema("move").template
        g = dom.schema("get").template
        parts = [substitute(m, {"?r": sigma["?r"], "?from": sigma["?from"], "?to": sigma["?to"]}),
                 substitute(g, {"?r": sigma["?r"], "?l": sigma["?to"]})]
        expected = compose_seq(parts, name="move-get", args=(sigma["?r"], sigma["?from"], sigma["?to"]))
        assert substitute(schema.template, sigma) == expected.macro


def test_independent_steps_union_their_parameters(robot):
    dom, prob = robot
    schema, _ = lift_compose(dom, recipe("macro two = (get ?r ?a) ; (move ?s ?b ?c)"), prob)
    assert [v for v, _ in schema.params] == ["?r", "?a", "?s", "?b", "?c"]


def test_undefined_for_every_grounding(robot):
    dom, _ = robot
    # the second get needs (empty ?r), which the first deletes
    with pytest.raises(UndefinedForAllGroundings):
        lift_compose(dom, recipe("macro twice = (get ?r ?l) ; (get ?r ?l)"))


def test_recipe_errors(robot):
    dom, _ = robot
    with pytest.raises(UnknownSchema):
        lift_compose(dom, recipe("macro x = (fly ?r) ; (get ?r ?l)"))
    with pytest.raises(RecipeError):
        lift_compose(dom, recipe("macro x = (move ?r ?a) ; (get ?r ?l)"))
    with pytest.raises(RecipeError):
        lift_compose(dom, recipe("macro x = (move ?r ?a ?b) ; (get ?a ?b)"))
    with pytest.raises(RecipeError):
        lift_compose(dom, recipe("macro x = (move ?r home ?b) ; (get ?r ?b)"))
    with pytest.raises(RecipeError):
        MacroRecipe("solo", (RecipeStep("get", ("?r", "?l")),))
    with pytest.raises(RecipeError):
        add_macros(dom, [recipe("macro move = (move ?r ?a ?b) ; (get ?r ?b)")])


def test_printed_macro_domain_can_be_reattached(robot):
    dom, prob = robot
    recipes = parse_config(ROBOT_MACROS).recipes
    full, _ = add_macros(dom, recipes)
    printed = parse_domain(emit_domain(full))
    base, again = attach_macros(printed, recipes)
    assert base == dom
    assert again == full
    tampered = parse_domain(emit_domain(full).replace("(= ?duration 3)", "(= ?duration 4)"))
    with pytest.raises(RecipeError):
        attach_macros(tampered, recipes)


# ------------------------------------------------------------ plans

def test_plan_parsing(robot):
    task = ground(*robot)
    plan = parse_plan("1.5: (move r l1 l2) [2]\n; comment\n4: (get r l2)", task.actions)
    assert plan == Plan([TimedAction(Fraction(3, 2), move()), TimedAction(Fraction(4), get())])


@pytest.mark.parametrize("text, error", [
    ("1: (move r l1 l2) [3]", DurationMismatch),
    ("1: (fly r)", UnknownAction),
    ("1: move r l1 l2", ParseError),
    ("0: (move r l1 l2)", ParseError),
    ("x: (move r l1 l2)", ParseError),
])
def test_plan_errors(robot, text, error):
    task = ground(*robot)
    with pytest.raises(error):
        parse_plan(text, task.actions)


def test_plan_round_trip_and_mangled_names(robot):
    task = ground(*robot)
    plan = Plan([(Fraction(1, 3), move()), (Fraction(5, 2), get())])
    assert parse_plan(emit_plan(plan), task.actions) == plan
    mangled = emit_plan(plan, mangle=True)
    assert "(move__r__l1__l2)" in mangled
    assert parse_plan(mangled, action_index(task.actions)) == plan


# ------------------------------------------------------------ grounded emission

def test_effect_safe_grounded_output_parses(robot):
    dom, prob = robot
    full, _ = add_macros(dom, parse_config(ROBOT_MACROS).recipes)
    est = build_effect_safe(ground(full, prob))
    domain_text, problem_text = emit_grounded(est.task, "robot-es", "robot-es-1")
    assert "can-add-at" in domain_text or "can-del-at" in domain_text
    again = parse_domain(domain_text)
    again_prob = parse_problem(problem_text, again)
    task = ground(again, again_prob)
    assert len(task.actions) == len(est.task.actions)
    assert task.init == est.task.init


# ------------------------------------------------------------ configuration

def test_config_parsing():
    cfg = parse_config("""
        # a comment
        macro mg = (move ?r ?a ?b) ; (get ?r ?b)   # trailing
        mutex mg = (can-del-at ?r ?b)
        move-schema move ?from ?to
        edge-predicate road
        edge l1 l2 = 3/2
        edge l2 l3 = 0.5
    """)
    assert str(cfg.recipes[0]) == "macro mg = (move ?r ?a ?b) ; (get ?r ?b)"
    assert cfg.mutex["mg"] == [Atom("can-del-at", ("?r", "?b"))]
    assert cfg.move.schema == "move" and cfg.edge_predicate == "road"
    assert cfg.edges == {("l1", "l2"): Fraction(3, 2), ("l2", "l3"): Fraction(1, 2)}


@pytest.mark.parametrize("text", [
    "macro mg (move ?r ?a ?b) ; (get ?r ?b)",
    "macro mg = move ?r ; (get ?r ?b)",
    "macro mg = (move ?r ?a ?b)",
    "macro m = (a) ; (b)\nmacro m = (a) ; (b)",
    "edge l1 = 2",
    "edge l1 l2 = -1",
    "edge l1 l2 = fast",
    "move-schema move ?from",
    "colour blue",
])
def test_config_errors(text):
    with pytest.raises((ConfigError, RecipeError)):
        parse_config(text)


def test_manifest_lists_lifted_mutex_atoms(robot):
    dom, _ = robot
    recipes = parse_config(ROBOT_MACROS).recipes
    full, _ = add_macros(dom, recipes)
    text = emit_manifest(recipes, list(full.schemas))
    again = parse_config(text)
    assert again.recipes == recipes
    expected = sorted(str(m) for m in full.schema("move-get").template.mutex)
    assert sorted(str(a) for a in again.mutex["move-get"]) == expected
