"""Shared fixtures, generators and independent oracles for the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from temporal_macros.composer import Defined, compose, compose_seq
from temporal_macros.model import Atom, DurativeAction, Literal, PlanningTask

F = Fraction


def A(text):
    return Atom.parse(text)


def atoms(*texts):
    return frozenset(Atom.parse(t) for t in texts)


def lits(*texts):
    return frozenset(Literal.parse(t) for t in texts)


# ------------------------------------------------------------ robot actions

def move(r="r", src="l1", dst="l2", dur=2):
    return DurativeAction.make(
        "move", dur,
        pre_s=[f"at {r} {src}"], pre_e=[f"free {dst}"],
        eff_s=[f"not at {r} {src}", f"free {src}"],
        eff_e=[f"at {r} {dst}", f"not free {dst}"],
        args=(r, src, dst))


def get(r="r", loc="l2", dur=1):
    return DurativeAction.make(
        "get", dur,
        pre_s=[f"empty {r}", f"at {r} {loc}"], pre_inv=[f"at {r} {loc}"],
        eff_s=[f"not empty {r}"], eff_e=[f"holding {r}"],
        args=(r, loc))


def move_get():
    return compose(move(), get(), name="move-get").macro


# ------------------------------------------------------------ rescued macro

def rescue_task():
    """Task where a concurrent action rescues a macro, so only the unsafe task is solvable."""
    a1 = DurativeAction.make("a1", 2, eff_s=["not v1"], eff_e=["not v2"])
    a2 = DurativeAction.make("a2", 2, pre_e=["v1"], eff_e=["v3"])
    a0 = compose(a1, a2, name="a0").macro
    a = DurativeAction.make("a", 1, eff_s=["v1", "v2"])
    return a0, a, PlanningTask.build([a0, a], init=[], goal=["v3"])


# ------------------------------------------------------------ random tasks

DURATIONS = [F(1), F(2), F(3), F(1, 2), F(3, 2)]


def random_action(rng: random.Random, name: str, pool: list[Atom]) -> DurativeAction:
    def pick(p):
        return frozenset(v for v in pool if rng.random() < p)

    pre_s, pre_inv, pre_e = pick(0.2), pick(0.12), pick(0.12)
    eff_s, eff_e = set(), set()
    for v in pool:
        roll = rng.random()
        if roll < 0.12:
            if v not in pre_inv:
                eff_s.add(Literal(v, False))
        elif roll < 0.24:
            eff_s.add(Literal(v, True))
        roll = rng.random()
        if roll < 0.15:
            eff_e.add(Literal(v, False))
        elif roll < 0.35:
            eff_e.add(Literal(v, True))
    return DurativeAction(name, rng.choice(DURATIONS), pre_s, pre_inv, pre_e,
                          frozenset(eff_s), frozenset(eff_e))


def random_task(rng: random.Random, max_atoms=6, max_actions=4):
    """Small task with 1-2 macros and at most ``max_actions`` actions in total.

    Returns None when the drawn macros are undefined (the caller redraws).
    """
    n_atoms = rng.randint(3, max_atoms)
    pool = [Atom(f"v{i}") for i in range(n_atoms)]
    n_macros = rng.randint(1, 2)
    n_plain = rng.randint(1, max_actions - n_macros)
    plain = [random_action(rng, f"b{i}", pool) for i in range(n_plain)]
    macros = []
    for m in range(n_macros):
        length = rng.choice([2, 2, 3])
        parts = [random_action(rng, f"m{m}c{j}", pool) for j in range(length)]
        outcome = compose_seq(parts, name=f"m{m}")
        if not isinstance(outcome, Defined):
            return None
        macros.append(outcome.macro)
    actions = plain + macros
    init = frozenset(v for v in pool if rng.random() < 0.4)
    reachable = set()
    for a in actions:
        reachable |= a.eff_s_add | a.eff_e_add
    candidates = sorted(reachable - init)
    if not candidates:
        return None
    goal = frozenset(rng.sample(candidates, rng.randint(1, min(2, len(candidates)))))
    return PlanningTask(frozenset(pool), frozenset(actions), init, goal)


# ------------------------------------------------------------ oracles

def simulate(init, plan_steps):
    """Brute-force event-sorting execution, written without the library's semantics.

    ``plan_steps`` is a list of (t, action). Returns one entry per event as
    (stamp, state, open) where ``open`` is the frozenset of
    (end time, start time, action) for steps started and not yet ended.
    """
    events = []
    for t, a in plan_steps:
        events.append((t, "start", t, a))
        events.append((t + a.dur, "end", t, a))
    events.sort(key=lambda e: e[0])
    state = set(init)
    running = set()
    out = [(Fraction(0), frozenset(state), frozenset())]
    for stamp, kind, t, a in events:
        effects = a.eff_s if kind == "start" else a.eff_e
        for l in effects:
            if not l.positive:
                state.discard(l.atom)
        for l in effects:
            if l.positive:
                state.add(l.atom)
        key = (t + a.dur, t, a)
        if kind == "start":
            running.add(key)
        else:
            running.discard(key)
        out.append((stamp, frozenset(state), frozenset(running)))
    return out


def oracle_solves(task, plan_steps) -> bool:
    """Independent check of the execution conditions and the goal."""
    times = []
    for t, a in plan_steps:
        times += [t, t + a.dur]
    if len(set(times)) != len(times) or any(t <= 0 for t, _ in plan_steps):
        return False
    events = sorted([(t, 0, t, a) for t, a in plan_steps] + [(t + a.dur, 1, t, a) for t, a in plan_steps],
                    key=lambda e: e[0])
    state, running = set(task.init), []
    for _, kind, t, a in events:
        if kind == 0:
            if not a.pre_s <= state:
                return False
            running.append((t, a))
            effects = a.eff_s
        else:
            if not a.pre_e <= state:
                return False
            running.remove((t, a))
            effects = a.eff_e
        state = ({l.atom for l in effects if l.positive}
                 | (state - {l.atom for l in effects if not l.positive}))
        for _, b in running:
            if not b.pre_inv <= state:
                return False
    return task.goal <= state


def grid_search(task, max_steps, horizon, eps):
    """Enumerate every plan with starts on the eps grid; return one solution or None."""
    actions = sorted(task.actions, key=lambda a: a.sort_key())
    slots = []
    k = 1
    while k * eps < horizon:
        slots.append(k * eps)
        k += 1
    options = [(t, a) for a in actions for t in slots if t + a.dur <= horizon]
    for n in range(1, max_steps + 1):
        for combo in itertools.combinations(options, n):
            if oracle_solves(task, list(combo)):
                return list(combo)
    return None


def simple_path_distances(nodes, edges):
    """Shortest distance per ordered pair by enumerating all simple paths."""
    adjacent = {}
    for (u, v), w in edges.items():
        if u != v:
            adjacent.setdefault(u, {})
            adjacent[u][v] = min(w, adjacent[u].get(v, w))
    best = {}

    def walk(start, node, visited, length):
        for nxt, w in adjacent.get(node, {}).items():
            if nxt in visited:
                continue
            total = length + w
            if (start, nxt) not in best or total < best[(start, nxt)]:
                best[(start, nxt)] = total
            walk(start, nxt, visited | {nxt}, total)

    for s in nodes:
        walk(s, s, {s}, Fraction(0))
    return best
