"""Lifted PDDL domains and problems: data types, parser and printer.

Only the durative STRIPS fragment is accepted: positive atomic conditions
tagged ``at start`` / ``over all`` / ``at end``, literal effects at start or
end, and constant durations ``(= ?duration q)``. Anything else is rejected
with its position.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from ..errors import ParseError, TypingError, UnknownSchema, UnsupportedFeature
from ..model import Atom, DurativeAction, Literal, format_rational, to_rational
from .sexpr import Node, SList, Sym, parse_one

ROOT_TYPE = "object"

SUPPORTED_REQUIREMENTS = {":strips", ":typing", ":durative-actions"}
REQUIREMENT_FEATURES = {
    ":negative-preconditions": "negative-precondition",
    ":disjunctive-preconditions": "disjunctive-precondition",
    ":existential-preconditions": "quantified-precondition",
    ":universal-preconditions": "quantified-precondition",
    ":quantified-preconditions": "quantified-precondition",
    ":conditional-effects": "conditional-effect",
    ":adl": "adl",
    ":equality": "equality",
    ":fluents": "numeric-fluent",
    ":numeric-fluents": "numeric-fluent",
    ":object-fluents": "object-fluent",
    ":duration-inequalities": "duration-inequality",
    ":continuous-effects": "continuous-effect",
    ":timed-initial-literals": "timed-initial-literal",
    ":derived-predicates": "derived-predicate",
    ":preferences": "preference",
    ":constraints": "constraint",
    ":action-costs": "numeric-fluent",
}
NUMERIC_HEADS = {"increase", "decrease", "assign", "scale-up", "scale-down",
                 "<", ">", "<=", ">=", "+", "-", "*", "/"}


def is_variable(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class LiftedSchema:
    """A durative action schema.

    ``template`` is a :class:`DurativeAction` over variables and constants
    whose ``args`` are the parameter variables. For composed schemas it is
    the symbolic macro tree, so grounding can rebuild the constituents.
    """

    params: tuple[tuple[str, str], ...]
    template: DurativeAction

    @property
    def name(self) -> str:
        return self.template.name

    @property
    def dur(self) -> Fraction:
        return self.template.dur

    @property
    def is_macro(self) -> bool:
        return self.template.is_macro

    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.params)

    def flat(self) -> "LiftedSchema":
        """The same schema with its macro structure forgotten (what PDDL text can hold)."""
        t = self.template
        return LiftedSchema(self.params, DurativeAction(
            t.name, t.dur, t.pre_s, t.pre_inv, t.pre_e, t.eff_s, t.eff_e, t.args))


@dataclass(frozen=True)
class LiftedDomain:
    name: str
    requirements: tuple[str, ...] = ()
    types: tuple[tuple[str, str], ...] = ()  # (type, parent)
    constants: tuple[tuple[str, str], ...] = ()
    predicates: tuple[tuple[str, tuple[tuple[str, str], ...]], ...] = ()
    schemas: tuple[LiftedSchema, ...] = ()
    _parents: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_parents", dict(self.types))

    def schema(self, name: str) -> LiftedSchema:
        for s in self.schemas:
            if s.name == name:
                return s
        raise UnknownSchema(f"no action schema named {name!r} in domain {self.name}")

    def predicate_types(self, name: str) -> Optional[tuple[str, ...]]:
        for pred, params in self.predicates:
            if pred == name:
                return tuple(t for _, t in params)
        return None

    def ancestors(self, t: str) -> list[str]:
        chain, seen = [t], {t}
        while chain[-1] in self._parents:
            parent = self._parents[chain[-1]]
            if parent in seen:
                break
            chain.append(parent)
            seen.add(parent)
        if ROOT_TYPE not in seen:
            chain.append(ROOT_TYPE)
        return chain

    def is_subtype(self, t: str, of: str) -> bool:
        return of in self.ancestors(t)

    def known_type(self, t: str) -> bool:
        return t == ROOT_TYPE or t in self._parents or any(p == t for _, p in self.types)

    def with_schemas(self, schemas: Iterable[LiftedSchema]) -> "LiftedDomain":
        return LiftedDomain(self.name, self.requirements, self.types, self.constants,
                            self.predicates, tuple(schemas))


@dataclass(frozen=True)
class Problem:
    name: str
    domain: str
    objects: tuple[tuple[str, str], ...]
    init: frozenset[Atom]
    goal: frozenset[Atom]
    metric: bool = False  # (:metric minimize (total-time)) present

    def __post_init__(self):
        object.__setattr__(self, "init", frozenset(self.init))
        object.__setattr__(self, "goal", frozenset(self.goal))


def objects_by_name(dom: LiftedDomain, prob: Optional[Problem] = None) -> dict[str, str]:
    table = dict(dom.constants)
    if prob is not None:
        table.update(dict(prob.objects))
    return table


# ---------------------------------------------------------------- parsing

def _sym(node: Node, expected: str) -> str:
    if not isinstance(node, Sym):
        raise ParseError("unexpected list", node.line, node.col, expected)
    return node.text


def _list(node: Node, expected: str) -> SList:
    if not isinstance(node, SList):
        raise ParseError(f"unexpected symbol {node.text!r}", node.line, node.col, expected)
    return node


def _typed_list(node: SList, want_vars: bool) -> list[tuple[str, str, Sym]]:
    """``a b - t c`` -> [(a, t), (b, t), (c, object)] with positions."""
    out, pending = [], []
    items = list(node.items)
    i = 0
    while i < len(items):
        tok = items[i]
        name = _sym(tok, "a name")
        if name == "-":
            if i + 1 >= len(items) or not pending:
                raise ParseError("dangling '-' in typed list", tok.line, tok.col, "a type name")
            tnode = items[i + 1]
            if isinstance(tnode, SList) and tnode.head() == "either":
                raise UnsupportedFeature("either-type", tnode.line, tnode.col)
            t = _sym(tnode, "a type name")
            out.extend((p.text, t, p) for p in pending)
            pending = []
            i += 2
            continue
        if want_vars != is_variable(name):
            raise ParseError(f"unexpected {name!r}", tok.line, tok.col,
                             "a variable" if want_vars else "a name")
        pending.append(tok)
        i += 1
    out.extend((p.text, ROOT_TYPE, p) for p in pending)
    return out


def _check_requirements(node: SList):
    for item in node.items[1:]:
        req = _sym(item, "a requirement flag")
        if req in SUPPORTED_REQUIREMENTS:
            continue
        raise UnsupportedFeature(REQUIREMENT_FEATURES.get(req, f"requirement {req}"),
                                 item.line, item.col)


class _Scope:
    """Type checking context for atoms in a schema body or problem."""

    def __init__(self, dom_parts, variables: dict[str, str], constants: dict[str, str]):
        self.types, self.predicates = dom_parts
        self.variables = variables
        self.constants = constants

    def subtype(self, t, of):
        seen = set()
        while t not in seen:
            if t == of:
                return True
            seen.add(t)
            if t not in self.types:
                break
            t = self.types[t]
        return of == ROOT_TYPE

    def atom(self, node: Node, where: str) -> Atom:
        lst = _list(node, f"an atom in {where}")
        if not lst.items:
            raise ParseError("empty atom", lst.line, lst.col, "a predicate name")
        head = lst.head()
        if head == "not":
            raise UnsupportedFeature("negative-precondition" if where != "goal" else "negative-goal",
                                     lst.line, lst.col)
        if head in ("and", "or", "imply", "exists", "forall"):
            feature = {"or": "disjunctive-precondition", "imply": "disjunctive-precondition",
                       "exists": "quantified-precondition", "forall": "quantified-precondition",
                       "and": "nested-conjunction"}[head]
            raise UnsupportedFeature(feature, lst.line, lst.col)
        if head == "=":
            raise UnsupportedFeature("equality" if all(isinstance(x, Sym) for x in lst.items)
                                     else "numeric-fluent", lst.line, lst.col)
        if head in NUMERIC_HEADS:
            raise UnsupportedFeature("numeric-fluent", lst.line, lst.col)
        if head == "when":
            raise UnsupportedFeature("conditional-effect", lst.line, lst.col)
        pred = _sym(lst.items[0], "a predicate name")
        args = tuple(_sym(x, "a term") for x in lst.items[1:])
        signature = self.predicates.get(pred)
        if signature is None:
            raise TypingError(f"{lst.line}:{lst.col}: undeclared predicate {pred!r}")
        if len(signature) != len(args):
            raise TypingError(f"{lst.line}:{lst.col}: predicate {pred} takes {len(signature)} "
                              f"arguments, got {len(args)}")
        for term, want, tok in zip(args, signature, lst.items[1:]):
            if is_variable(term):
                if term not in self.variables:
                    raise ParseError(f"undeclared variable {term}", tok.line, tok.col,
                                     "a parameter of the action")
                have = self.variables[term]
            else:
                if term not in self.constants:
                    raise TypingError(f"{tok.line}:{tok.col}: unknown object {term!r}")
                have = self.constants[term]
            if not self.subtype(have, want):
                raise TypingError(f"{tok.line}:{tok.col}: {term} has type {have}, "
                                  f"{pred} expects {want}")
        return Atom(pred, args)

    def literal(self, node: Node, where: str) -> Literal:
        lst = _list(node, f"a literal in {where}")
        if lst.head() == "not":
            if len(lst) != 2:
                raise ParseError("'not' takes one atom", lst.line, lst.col)
            return Literal(self.atom(lst.items[1], where), False)
        if lst.head() == "forall":
            raise UnsupportedFeature("universal-effect", lst.line, lst.col)
        return Literal(self.atom(lst, where), True)


def _conjuncts(node: Node) -> list[Node]:
    lst = _list(node, "a condition or effect")
    if not lst.items:
        return []
    if lst.head() == "and":
        return list(lst.items[1:])
    return [lst]


def _timed(node: Node, allowed: tuple[str, ...]) -> tuple[str, Node]:
    lst = _list(node, "(at start ...), (over all ...) or (at end ...)")
    head = lst.head()
    if head in ("when", "forall", "or", "imply", "exists", "not") or head in NUMERIC_HEADS:
        feature = {"when": "conditional-effect", "forall": "quantified-condition",
                   "or": "disjunctive-precondition", "imply": "disjunctive-precondition",
                   "exists": "quantified-precondition", "not": "untimed-literal"}.get(head, "numeric-fluent")
        raise UnsupportedFeature(feature, lst.line, lst.col)
    if len(lst) == 3 and isinstance(lst.items[1], Sym):
        tag = f"{head} {lst.items[1].text}"
        if tag in allowed:
            return tag, lst.items[2]
    raise ParseError("untimed or malformed condition/effect", lst.line, lst.col,
                     " or ".join(f"({t} ...)" for t in allowed))


def _duration(node: Node) -> Fraction:
    lst = _list(node, "(= ?duration <number>)")
    head = lst.head()
    if head in ("<=", ">=", "<", ">", "and"):
        raise UnsupportedFeature("duration-inequality", lst.line, lst.col)
    if head != "=" or len(lst) != 3 or _sym(lst.items[1], "?duration") != "?duration":
        raise ParseError("malformed duration constraint", lst.line, lst.col, "(= ?duration <number>)")
    value = lst.items[2]
    if isinstance(value, SList):
        raise UnsupportedFeature("numeric-fluent", value.line, value.col)
    try:
        dur = to_rational(value.text)
    except ValueError:
        raise ParseError(f"bad duration {value.text!r}", value.line, value.col,
                         "a positive decimal or integer") from None
    if dur <= 0:
        raise ParseError(f"duration must be positive, got {value.text}", value.line, value.col)
    return dur


def _parse_schema(node: SList, dom_parts, constants) -> LiftedSchema:
    items = list(node.items)
    name = _sym(items[1], "an action name") if len(items) > 1 else None
    if name is None:
        raise ParseError("missing action name", node.line, node.col)
    fields = {}
    i = 2
    while i < len(items):
        key = _sym(items[i], "an action field such as :parameters")
        if i + 1 >= len(items):
            raise ParseError(f"missing value for {key}", items[i].line, items[i].col)
        fields[key] = items[i + 1]
        i += 2
    for key in fields:
        if key not in (":parameters", ":duration", ":condition", ":effect"):
            raise ParseError(f"unknown action field {key}", node.line, node.col)
    if ":duration" not in fields:
        raise ParseError(f"action {name} has no :duration", node.line, node.col)
    params = []
    if ":parameters" in fields:
        for var, t, tok in _typed_list(_list(fields[":parameters"], "a parameter list"), True):
            if var in dict(params):
                raise ParseError(f"duplicate parameter {var}", tok.line, tok.col)
            params.append((var, t))
    scope = _Scope(dom_parts, dict(params), constants)
    dur = _duration(fields[":duration"])
    pre = {"at start": set(), "over all": set(), "at end": set()}
    eff = {"at start": set(), "at end": set()}
    if ":condition" in fields:
        for c in _conjuncts(fields[":condition"]):
            tag, body = _timed(c, ("at start", "over all", "at end"))
            pre[tag].add(scope.atom(body, "condition"))
    if ":effect" in fields:
        for e in _conjuncts(fields[":effect"]):
            tag, body = _timed(e, ("at start", "at end"))
            eff[tag].add(scope.literal(body, "effect"))
    template = DurativeAction(name, dur, frozenset(pre["at start"]), frozenset(pre["over all"]),
                              frozenset(pre["at end"]), frozenset(eff["at start"]),
                              frozenset(eff["at end"]), tuple(v for v, _ in params))
    return LiftedSchema(tuple(params), template)


def _expect_define(root: SList, kind: str) -> str:
    if root.head() != "define" or len(root) < 2:
        raise ParseError("expected (define ...)", root.line, root.col, "(define ...)")
    header = _list(root.items[1], f"({kind} <name>)")
    if header.head() != kind or len(header) != 2:
        raise ParseError(f"expected ({kind} <name>)", header.line, header.col)
    return _sym(header.items[1], f"a {kind} name")


def parse_domain(text: str) -> LiftedDomain:
    root = parse_one(text)
    name = _expect_define(root, "domain")
    requirements, types, constants, predicates, schema_nodes = [], [], [], [], []
    for section in root.items[2:]:
        sec = _list(section, "a domain section")
        head = sec.head()
        if head == ":requirements":
            _check_requirements(sec)
            requirements = [x.text for x in sec.items[1:]]
        elif head == ":types":
            for t, parent, tok in _typed_list(SList(sec.items[1:], sec.line, sec.col), False):
                if t != ROOT_TYPE:
                    types.append((t, parent))
        elif head == ":constants":
            constants = [(c, t) for c, t, _ in _typed_list(SList(sec.items[1:], sec.line, sec.col), False)]
        elif head == ":predicates":
            for p in sec.items[1:]:
                plist = _list(p, "a predicate declaration")
                pname = _sym(plist.items[0], "a predicate name") if plist.items else None
                if pname is None:
                    raise ParseError("empty predicate declaration", plist.line, plist.col)
                params = [(v, t) for v, t, _ in _typed_list(SList(plist.items[1:], plist.line, plist.col), True)]
                if any(pname == q for q, _ in predicates):
                    raise TypingError(f"{plist.line}:{plist.col}: predicate {pname} declared twice")
                predicates.append((pname, tuple(params)))
        elif head == ":durative-action":
            schema_nodes.append(sec)
        elif head == ":action":
            raise UnsupportedFeature("instantaneous-action", sec.line, sec.col)
        elif head == ":functions":
            raise UnsupportedFeature("numeric-fluent", sec.line, sec.col)
        elif head == ":derived":
            raise UnsupportedFeature("derived-predicate", sec.line, sec.col)
        elif head == ":constraints":
            raise UnsupportedFeature("constraint", sec.line, sec.col)
        else:
            raise ParseError(f"unknown domain section {head or '?'}", sec.line, sec.col)
    type_table = dict(types)
    declared = set(type_table) | set(type_table.values()) | {ROOT_TYPE}
    for _, t in constants:
        if t not in declared:
            raise TypingError(f"unknown type {t!r} for a constant")
    for pname, params in predicates:
        for _, t in params:
            if t not in declared:
                raise TypingError(f"unknown type {t!r} in predicate {pname}")
    dom_parts = (type_table, {p: tuple(t for _, t in ps) for p, ps in predicates})
    schemas = []
    for node in schema_nodes:
        schema = _parse_schema(node, dom_parts, dict(constants))
        for _, t in schema.params:
            if t not in declared:
                raise TypingError(f"{node.line}:{node.col}: unknown type {t!r} in {schema.name}")
        if any(s.name == schema.name for s in schemas):
            raise ParseError(f"duplicate action {schema.name}", node.line, node.col)
        schemas.append(schema)
    return LiftedDomain(name, tuple(requirements), tuple(types), tuple(constants),
                        tuple(predicates), tuple(schemas))


def parse_problem(text: str, dom: LiftedDomain) -> Problem:
    root = parse_one(text)
    name = _expect_define(root, "problem")
    domain_name, objects, init, goal, metric = None, [], set(), set(), False
    init_nodes, goal_node = [], None
    for section in root.items[2:]:
        sec = _list(section, "a problem section")
        head = sec.head()
        if head == ":domain":
            domain_name = _sym(sec.items[1], "a domain name") if len(sec) == 2 else None
            if domain_name != dom.name:
                raise ParseError(f"problem is for domain {domain_name!r}", sec.line, sec.col,
                                 f"(:domain {dom.name})")
        elif head == ":objects":
            objects = [(o, t) for o, t, _ in _typed_list(SList(sec.items[1:], sec.line, sec.col), False)]
        elif head == ":init":
            init_nodes = list(sec.items[1:])
        elif head == ":goal":
            if len(sec) != 2:
                raise ParseError("expected one goal formula", sec.line, sec.col)
            goal_node = sec.items[1]
        elif head == ":metric":
            ok = (len(sec) == 3 and isinstance(sec.items[1], Sym) and sec.items[1].text == "minimize"
                  and isinstance(sec.items[2], SList) and len(sec.items[2]) == 1
                  and sec.items[2].head() == "total-time")
            if not ok:
                raise UnsupportedFeature("metric other than (minimize (total-time))", sec.line, sec.col)
            metric = True
        elif head == ":requirements":
            _check_requirements(sec)
        else:
            raise ParseError(f"unknown problem section {head or '?'}", sec.line, sec.col)
    if domain_name is None:
        raise ParseError("missing (:domain ...)", root.line, root.col)
    type_table = dict(dom.types)
    declared = set(type_table) | set(type_table.values()) | {ROOT_TYPE}
    for o, t in objects:
        if t not in declared:
            raise TypingError(f"unknown type {t!r} for object {o}")
    table = dict(dom.constants)
    for o, t in objects:
        if o in table and table[o] != t:
            raise TypingError(f"object {o} declared with types {table[o]} and {t}")
        table[o] = t
    scope = _Scope((type_table, {p: tuple(t for _, t in ps) for p, ps in dom.predicates}), {}, table)
    for node in init_nodes:
        lst = _list(node, "an initial fact")
        if lst.head() == "=":
            raise UnsupportedFeature("numeric-fluent", lst.line, lst.col)
        if lst.head() == "at" and len(lst) == 3 and isinstance(lst.items[2], SList):
            raise UnsupportedFeature("timed-initial-literal", lst.line, lst.col)
        if lst.head() == "not":
            raise ParseError("negative initial fact (closed world)", lst.line, lst.col)
        init.add(scope.atom(lst, "init"))
    if goal_node is not None:
        for g in _conjuncts(goal_node):
            goal.add(scope.atom(g, "goal"))
    return Problem(name, domain_name, tuple(objects), frozenset(init), frozenset(goal), metric)


# ---------------------------------------------------------------- printing

def _atom_text(a: Atom) -> str:
    return str(a)


def _typed_text(pairs, typed: bool) -> str:
    if not typed:
        return " ".join(n for n, _ in pairs)
    chunks, i = [], 0
    pairs = list(pairs)
    while i < len(pairs):
        j = i
        while j < len(pairs) and pairs[j][1] == pairs[i][1]:
            j += 1
        chunks.append(" ".join(n for n, _ in pairs[i:j]) + f" - {pairs[i][1]}")
        i = j
    return " ".join(chunks)


def format_number(q: Fraction) -> str:
    """Decimal text when finite, otherwise ``p/q``."""
    q = to_rational(q)
    d = q.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return format_rational(q)
    if q.denominator == 1:
        return str(q.numerator)
    places = max(twos, fives)
    scaled = q * 10 ** places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def _schema_text(s: LiftedSchema, typed: bool) -> str:
    t = s.template
    conds = ([f"(at start {_atom_text(a)})" for a in sorted(t.pre_s)]
             + [f"(over all {_atom_text(a)})" for a in sorted(t.pre_inv)]
             + [f"(at end {_atom_text(a)})" for a in sorted(t.pre_e)])
    effs = ([f"(at start {l})" for l in sorted(t.eff_s)]
            + [f"(at end {l})" for l in sorted(t.eff_e)])

    def block(parts):
        if not parts:
            return "()"
        return "(and\n      " + "\n      ".join(parts) + ")"

    return (f"  (:durative-action {s.name}\n"
            f"    :parameters ({_typed_text(s.params, typed)})\n"
            f"    :duration (= ?duration {format_number(s.dur)})\n"
            f"    :condition {block(conds)}\n"
            f"    :effect {block(effs)})")


def _is_typed(dom: LiftedDomain) -> bool:
    return bool(dom.types) or ":typing" in dom.requirements


def emit_domain(dom: LiftedDomain) -> str:
    typed = _is_typed(dom)
    reqs = list(dom.requirements) or [":durative-actions"] + ([":typing"] if typed else [])
    lines = [f"(define (domain {dom.name})", f"  (:requirements {' '.join(reqs)})"]
    if dom.types:
        lines.append(f"  (:types {_typed_text(dom.types, True)})")
    if dom.constants:
        lines.append(f"  (:constants {_typed_text(dom.constants, typed)})")
    preds = " ".join(f"({p}{' ' if ps else ''}{_typed_text(ps, typed)})" for p, ps in dom.predicates)
    lines.append(f"  (:predicates {preds})")
    for s in dom.schemas:
        lines.append(_schema_text(s, typed))
    return "\n".join(lines) + ")\n"


def emit_problem(prob: Problem, dom: Optional[LiftedDomain] = None) -> str:
    typed = dom is None or _is_typed(dom)
    lines = [f"(define (problem {prob.name})", f"  (:domain {prob.domain})"]
    if prob.objects:
        lines.append(f"  (:objects {_typed_text(prob.objects, typed)})")
    lines.append("  (:init" + "".join(f"\n    {a}" for a in sorted(prob.init)) + ")")
    lines.append("  (:goal (and" + "".join(f"\n    {a}" for a in sorted(prob.goal)) + "))")
    if prob.metric:
        lines.append("  (:metric minimize (total-time))")
    return "\n".join(lines) + ")\n"
