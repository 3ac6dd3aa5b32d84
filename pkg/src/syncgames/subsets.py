"""Subset construction over supports, SCC periods, accepting-SCC search."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .core import CapExceeded, Game
from .graphs import is_cyclic, period, tarjan

VERTEX_BUDGET = 1 << 16


def selector_image(g: Game, s: Iterable[int], alpha) -> frozenset:
    """Union of successor supports of s when each state q plays alpha[q]."""
    out = frozenset()
    for q in s:
        out |= g.image[q][alpha[q]]
    return out


def _images(g: Game, s: frozenset) -> dict:
    """All distinct selector images of s, each with a witness selector."""
    partial = {frozenset(): ()}
    for q in sorted(s):
        choices = {}
        for a in range(g.m):
            choices.setdefault(g.image[q][a], a)
        nxt = {}
        for acc, wit in partial.items():
            for img, a in choices.items():
                nxt.setdefault(acc | img, wit + ((q, a),))
        partial = nxt
    out = {}
    for img, wit in partial.items():
        alpha = [0] * g.n
        for q, a in wit:
            alpha[q] = a
        out[img] = tuple(alpha)
    return out


@dataclass
class SubsetGraph:
    """Fragment of the subset construction reachable from some seeds."""

    game: Game
    vertices: list = field(default_factory=list)
    edges: dict = field(default_factory=dict)  # vertex -> {image: selector}

    def succ(self, v):
        return self.edges[v].keys()

    def to_dot(self) -> str:
        g = self.game
        label = lambda v: "{" + ",".join(g.names(v)) + "}"
        lines = ["digraph subsets {"]
        for v in self.vertices:
            lines.append(f'  "{label(v)}";')
        for v in self.vertices:
            for w, alpha in self.edges[v].items():
                sel = " ".join(f"{g.states[q]}:{g.actions[alpha[q]]}" for q in sorted(v))
                lines.append(f'  "{label(v)}" -> "{label(w)}" [label="{sel}"];')
        lines.append("}")
        return "\n".join(lines)


def reachable_subsets(g: Game, seeds, budget: int = VERTEX_BUDGET) -> SubsetGraph:
    """Breadth-first closure of the seed sets under selector images.

    ``seeds`` is a single state set or a list of them.
    """
    seeds = list(seeds)
    if seeds and not isinstance(seeds[0], (set, frozenset)):
        seeds = [frozenset(seeds)]
    graph = SubsetGraph(g)
    queue = deque()
    for s in seeds:
        s = frozenset(s)
        if s and s not in graph.edges:
            graph.edges[s] = None
            graph.vertices.append(s)
            queue.append(s)
    while queue:
        v = queue.popleft()
        graph.edges[v] = _images(g, v)
        for w in graph.edges[v]:
            if w not in graph.edges:
                if len(graph.vertices) >= budget:
                    raise CapExceeded(f"subset graph exceeds {budget} vertices")
                graph.edges[w] = None
                graph.vertices.append(w)
                queue.append(w)
    return graph


def scc_periods(graph: SubsetGraph) -> list:
    """Cyclic SCCs of the fragment with their periods."""
    out = []
    for comp in tarjan(graph.vertices, graph.succ):
        if is_cyclic(comp, graph.succ):
            out.append((frozenset(comp), period(comp, graph.succ)))
    return out


class AcceptingSCC(NamedTuple):
    scc: frozenset
    U: frozenset
    period: int


def _order(s: frozenset):
    return (-len(s), sorted(s))


def find_accepting_scc(g: Game, t: Iterable[int], budget: int = VERTEX_BUDGET,
                       graph: SubsetGraph | None = None):
    """A cyclic SCC holding a nonempty vertex inside t, or None.

    Seeds are all singletons and t itself. The accepting vertex is the
    first in order of decreasing size, then lexicographic.
    """
    t = frozenset(t)
    if graph is None:
        seeds = [frozenset([q]) for q in range(g.n)] + ([t] if t else [])
        graph = reachable_subsets(g, seeds, budget)
    best = None
    for comp, p in scc_periods(graph):
        for v in comp:
            if v <= t and (best is None or _order(v) < _order(best.U)):
                best = AcceptingSCC(comp, v, p)
    return best


def sure_weakly_supports(g: Game, t: Iterable[int], graph: SubsetGraph) -> set:
    """Vertices of the fragment with a path to an accepting vertex on a cycle."""
    t = frozenset(t)
    good = set()
    for comp, _ in scc_periods(graph):
        good.update(v for v in comp if v <= t)
    pred = {v: set() for v in graph.vertices}
    for v in graph.vertices:
        for w in graph.succ(v):
            pred[w].add(v)
    seen = set(good)
    queue = deque(good)
    while queue:
        w = queue.popleft()
        for v in pred[w]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen
