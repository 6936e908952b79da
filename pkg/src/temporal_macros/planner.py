"""Small exhaustive temporal planner for toy tasks.

The search enumerates event orderings rather than clock values: each node
appends either the start of a new step or the end of a running one. The
states along an ordering do not depend on the exact times, only on whether
some schedule realises the ordering. That is a system of difference
constraints over the start times (strict between consecutive events,
``end <= horizon``), decided exactly by a longest-path computation in which
strict edges carry an infinitesimal bonus.

A solved ordering is scheduled as early as possible with at least
``epsilon`` between consecutive events (shrinking the gap only when the
durations force it), so every returned plan has pairwise distinct event
times. Because every real-valued schedule within the bounds has some
ordering, an exhausted search certifies that no plan with at most
``max_steps`` steps ending by ``horizon`` exists, on any time grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import IllFormedAction
from .model import DurativeAction, Plan, PlanningTask, TimedAction, to_rational, validate_action
from .semantics import check_plan

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchLimits:
    max_steps: int = 4
    horizon: Fraction = Fraction(100)
    epsilon: Fraction = Fraction(1, 100)
    node_budget: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "horizon", to_rational(self.horizon))
        object.__setattr__(self, "epsilon", to_rational(self.epsilon))
        if self.max_steps < 0 or self.node_budget <= 0:
            raise ValueError("max_steps must be >= 0 and node_budget > 0")
        if self.horizon <= 0 or self.epsilon <= 0:
            raise ValueError("horizon and epsilon must be positive")

    @classmethod
    def parse(cls, text: str) -> "SearchLimits":
        """Parse ``steps=K,horizon=Q,eps=Q,budget=N`` (any subset)."""
        names = {"steps": "max_steps", "horizon": "horizon", "eps": "epsilon",
                 "epsilon": "epsilon", "budget": "node_budget"}
        values = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, value = part.partition("=")
            if not sep or key.strip() not in names:
                raise ValueError(f"bad limits entry {part!r}")
            field_name = names[key.strip()]
            values[field_name] = (int(value) if field_name in ("max_steps", "node_budget")
                                  else to_rational(value))
        return cls(**values)


@dataclass(frozen=True)
class Solved:
    plan: Plan
    nodes: int = 0


@dataclass(frozen=True)
class ExhaustedComplete:
    nodes: int = 0


@dataclass(frozen=True)
class BudgetExceeded:
    nodes: int = 0


SearchResult = Union[Solved, ExhaustedComplete, BudgetExceeded]

_ORIGIN = 0


def _longest_paths(n_vars, edges, separation=None):
    """Earliest times for ``x_v - x_u >= w (+ gap if strict)``, or None if infeasible.

    With ``separation=None`` the gap is infinitesimal: weights are compared
    as ``(w, number of strict edges)`` pairs.
    """
    if separation is None:
        weights = [(u, v, (w, 1 if strict else 0)) for u, v, w, strict in edges]
        zero = (Fraction(0), 0)

        def plus(a, b):
            return (a[0] + b[0], a[1] + b[1])
    else:
        weights = [(u, v, w + separation if strict else w) for u, v, w, strict in edges]
        zero = Fraction(0)

        def plus(a, b):
            return a + b

    dist = [None] * n_vars
    dist[_ORIGIN] = zero
    for _ in range(n_vars):
        changed = False
        for u, v, w in weights:
            if dist[u] is None:
                continue
            candidate = plus(dist[u], w)
            if dist[v] is None or candidate > dist[v]:
                dist[v] = candidate
                changed = True
        if not changed:
            return dist
    return None


@dataclass
class _Node:
    state: frozenset
    steps: list = field(default_factory=list)  # actions by start order
    running: tuple = ()
    last: Optional[tuple] = None  # (var, offset) of the latest event
    edges: list = field(default_factory=list)


class _Search:
    def __init__(self, task: PlanningTask, limits: SearchLimits):
        self.task = task
        self.limits = limits
        self.actions = task.sorted_actions()
        self.nodes = 0

    def _time(self, node, kind, j):
        return (j + 1, Fraction(0) if kind == "start" else node.steps[j].dur)

    @staticmethod
    def _before(a, b):
        """Edge saying event a happens strictly before event b."""
        (va, ca), (vb, cb) = a, b
        return (va, vb, ca - cb, True)

    def _children(self, node, max_steps):
        children = []
        goal = self.task.goal
        for j in node.running:
            a = node.steps[j]
            if not a.pre_e <= node.state:
                continue
            state = _apply(node.state, a.eff_e)
            running = tuple(r for r in node.running if r != j)
            if not all(node.steps[r].pre_inv <= state for r in running):
                continue
            event = self._time(node, "end", j)
            edges = list(node.edges)
            edges.append(self._before(node.last, event))
            edges.extend(self._before(event, self._time(node, "end", r)) for r in running)
            children.append((len(goal - state), 0, a.sort_key(),
                             _Node(state, node.steps, running, event, edges)))
        if len(node.steps) < max_steps:
            j = len(node.steps)
            for a in self.actions:
                if not a.pre_s <= node.state:
                    continue
                state = _apply(node.state, a.eff_s)
                steps = node.steps + [a]
                running = node.running + (j,)
                if not all(steps[r].pre_inv <= state for r in running):
                    continue
                event = (j + 1, Fraction(0))
                edges = list(node.edges)
                if node.last is None:
                    edges.append((_ORIGIN, j + 1, Fraction(0), True))
                else:
                    edges.append(self._before(node.last, event))
                edges.extend(self._before(event, (r + 1, steps[r].dur)) for r in node.running)
                edges.append((j + 1, _ORIGIN, a.dur - self.limits.horizon, False))
                children.append((len(goal - state), 1, a.sort_key(),
                                 _Node(state, steps, running, event, edges)))
        children.sort(key=lambda c: c[:3])
        return [c[3] for c in children]

    def dfs(self, node, max_steps):
        """Return a goal node, None when the subtree is exhausted; raise on budget."""
        self.nodes += 1
        if self.nodes > self.limits.node_budget:
            raise _OutOfBudget
        if not node.running and node.steps and self.task.goal <= node.state:
            return node
        for child in self._children(node, max_steps):
            if _longest_paths(len(child.steps) + 1, child.edges) is None:
                continue
            found = self.dfs(child, max_steps)
            if found is not None:
                return found
        return None

    def schedule(self, node) -> Plan:
        n_vars = len(node.steps) + 1
        gap = self.limits.epsilon
        while True:
            times = _longest_paths(n_vars, node.edges, gap)
            if times is not None:
                break
            gap /= 2
        return Plan(TimedAction(times[j + 1], a) for j, a in enumerate(node.steps))


class _OutOfBudget(Exception):
    pass


def _apply(state, literals):
    adds = {l.atom for l in literals if l.positive}
    dels = {l.atom for l in literals if not l.positive}
    return frozenset(adds | (state - dels))


def solve(task: PlanningTask, limits: SearchLimits = SearchLimits()) -> SearchResult:
    for a in task.actions:
        report = validate_action(a)
        if not report.ok:
            raise IllFormedAction(a, [str(v) for v in report.violations])
    if task.goal <= task.init:
        return Solved(Plan(), 0)
    search = _Search(task, limits)
    root = _Node(task.init)
    try:
        for bound in range(1, limits.max_steps + 1):
            found = search.dfs(root, bound)
            if found is not None:
                plan = search.schedule(found)
                report = check_plan(task, plan)
                if not report.solves:
                    raise RuntimeError("planner produced a non-solution: "
                                       + "; ".join(str(v) for v in report.violations))
                log.debug("solved with %d steps after %d nodes", len(plan), search.nodes)
                return Solved(plan, search.nodes)
    except _OutOfBudget:
        return BudgetExceeded(search.nodes)
    return ExhaustedComplete(search.nodes)
