"""Small directed-graph helpers shared by the subset construction and the oracle."""
from __future__ import annotations

from collections import deque
from math import gcd
from typing import Callable, Hashable, Iterable


def tarjan(nodes: Iterable[Hashable], succ: Callable) -> list:
    """Strongly connected components, iterative Tarjan; reverse topological order."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def is_cyclic(comp: list, succ: Callable) -> bool:
    """A component carries a cycle unless it is a singleton without a self-loop."""
    if len(comp) > 1:
        return True
    v = comp[0]
    return v in set(succ(v))


def period(comp: Iterable[Hashable], succ: Callable) -> int:
    """gcd of cycle lengths of a strongly connected component, via BFS depths."""
    members = set(comp)
    root = next(iter(comp))
    depth = {root: 0}
    queue = deque([root])
    p = 0
    while queue:
        u = queue.popleft()
        for v in succ(u):
            if v not in members:
                continue
            if v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
            else:
                p = gcd(p, abs(depth[u] + 1 - depth[v]))
    return p


def reachable(start: Iterable[Hashable], succ: Callable) -> set:
    seen = set(start)
    queue = deque(seen)
    while queue:
        u = queue.popleft()
        for v in succ(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen
