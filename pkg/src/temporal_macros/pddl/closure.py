"""Replace a per-edge move schema by direct moves along shortest paths.

Edges are the initial facts of a static edge predicate; their durations come
from the configuration table, since the supported PDDL subset has no numeric
fluents. Every distinct shortest distance ``d`` gets its own clone of the
move schema with duration ``d``, guarded by a fresh predicate
``<edge>-sp<i>`` that holds exactly for the location pairs at distance ``d``.
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

from ..errors import ConfigError, NotAMoveSchema, UnknownSchema
from ..model import Atom, DurativeAction
from .config import MoveSpec
from .domain import LiftedDomain, LiftedSchema, Problem


def floyd_warshall(nodes, edges: dict[tuple[str, str], Fraction]) -> dict[tuple[str, str], Fraction]:
    """All-pairs shortest distances over exact weights; unreachable pairs are absent."""
    dist = {}
    for (u, v), w in edges.items():
        if u != v and ((u, v) not in dist or w < dist[(u, v)]):
            dist[(u, v)] = w
    nodes = sorted(set(nodes))
    for k in nodes:
        for i in nodes:
            dik = dist.get((i, k))
            if dik is None:
                continue
            for j in nodes:
                if i == j:
                    continue
                dkj = dist.get((k, j))
                if dkj is None:
                    continue
                through = dik + dkj
                if (i, j) not in dist or through < dist[(i, j)]:
                    dist[(i, j)] = through
    return dist


def _edge_weights(prob: Problem, edge_predicate: str, table):
    facts = {a.args for a in prob.init if a.predicate == edge_predicate}
    weights = {}
    for args in sorted(facts):
        if len(args) != 2:
            raise ConfigError(f"edge predicate {edge_predicate} must be binary")
        if args not in table:
            raise ConfigError(f"no duration for edge {args[0]} -> {args[1]}")
        weights[args] = table[args]
    extra = sorted(set(table) - facts)
    if extra:
        u, v = extra[0]
        raise ConfigError(f"edge {u} -> {v} has a duration but no ({edge_predicate} {u} {v}) fact")
    return weights


def shortest_path_closure(dom: LiftedDomain, prob: Problem, move: MoveSpec,
                          edge_predicate: str, table: dict[tuple[str, str], Fraction]):
    try:
        schema = dom.schema(move.schema)
    except UnknownSchema as exc:
        raise NotAMoveSchema(str(exc)) from None
    params = dict(schema.params)
    if schema.is_macro or move.from_param not in params or move.to_param not in params:
        raise NotAMoveSchema(f"{move.schema} has no parameters {move.from_param} and {move.to_param}")
    edge_atom = Atom(edge_predicate, (move.from_param, move.to_param))
    t = schema.template
    if edge_atom not in t.pre_s | t.pre_inv | t.pre_e:
        raise NotAMoveSchema(f"{move.schema} does not require {edge_atom}")
    if edge_atom in {l.atom for l in t.eff_s | t.eff_e}:
        raise NotAMoveSchema(f"{move.schema} changes the edge predicate {edge_predicate}")

    weights = _edge_weights(prob, edge_predicate, table)
    nodes = {u for u, _ in weights} | {v for _, v in weights}
    dist = floyd_warshall(nodes, weights)
    levels = sorted(set(dist.values()))

    taken = {p for p, _ in dom.predicates}
    new_predicates, clones, facts = [], [], set()
    for i, d in enumerate(levels, start=1):
        pred = f"{edge_predicate}-sp{i}"
        if pred in taken:
            raise ConfigError(f"predicate {pred} already exists")
        new_predicates.append((pred, (("?from", params[move.from_param]), ("?to", params[move.to_param]))))
        guard = Atom(pred, edge_atom.args)

        def swap(atoms):
            return frozenset(guard if a == edge_atom else a for a in atoms)

        template = DurativeAction(f"{move.schema}-sp{i}", d, swap(t.pre_s), swap(t.pre_inv),
                                  swap(t.pre_e), t.eff_s, t.eff_e, t.args)
        clones.append(LiftedSchema(schema.params, template))
        facts.update(Atom(pred, pair) for pair, dd in dist.items() if dd == d)

    schemas = []
    for s in dom.schemas:
        if s.name == move.schema:
            schemas.extend(clones)
        else:
            schemas.append(s)
    out_dom = replace(dom, predicates=dom.predicates + tuple(new_predicates), schemas=tuple(schemas))
    out_prob = replace(prob, init=prob.init | facts)
    return out_dom, out_prob, dist
