"""Predecessor operators, attractors, subgames, traps and counter products."""
from __future__ import annotations

from typing import Iterable, NamedTuple

from .core import CapExceeded, Distribution, Game, GameError

MAX_PRODUCT_STATES = 1 << 12


def cpre(g: Game, s: Iterable[int]) -> frozenset:
    s = frozenset(s)
    return frozenset(q for q in range(g.n)
                     if any(all(x <= s for x in row) for row in g.supp[q]))


def pospre(g: Game, player: int, s: Iterable[int]) -> frozenset:
    s = frozenset(s)
    if player == 1:
        return frozenset(q for q in range(g.n)
                         if any(all(x & s for x in row) for row in g.supp[q]))
    if player == 2:
        return frozenset(q for q in range(g.n)
                         if all(any(x & s for x in row) for row in g.supp[q]))
    raise ValueError(f"player must be 1 or 2, got {player}")


def apre(g: Game, y: Iterable[int], x: Iterable[int]) -> frozenset:
    y, x = frozenset(y), frozenset(x)
    return frozenset(q for q in range(g.n)
                     if any(all(s <= y and s & x for s in row) for row in g.supp[q]))


class Attractor(NamedTuple):
    region: frozenset
    layer: dict  # state -> least iteration at which it entered


def _layered(t, step) -> Attractor:
    layer = {q: 0 for q in t}
    cur = frozenset(t)
    i = 0
    while True:
        nxt = step(cur) | cur
        if nxt == cur:
            return Attractor(cur, layer)
        i += 1
        for q in nxt - cur:
            layer[q] = i
        cur = nxt


def attractor(g: Game, t: Iterable[int]) -> Attractor:
    return _layered(frozenset(t), lambda x: cpre(g, x))


def pos_attractor(g: Game, player: int, t: Iterable[int]) -> Attractor:
    return _layered(frozenset(t), lambda x: pospre(g, player, x))


def attractor_strategy(g: Game, attr: Attractor) -> dict:
    """Player-1 actions forcing the next layer down (states of layer > 0)."""
    out = {}
    for q, i in attr.layer.items():
        if i == 0:
            continue
        lower = frozenset(p for p, j in attr.layer.items() if j < i)
        out[q] = next(a for a, row in enumerate(g.supp[q]) if all(x <= lower for x in row))
    return out


def pos_attractor_strategy(g: Game, attr: Attractor) -> dict:
    """Player-1 actions hitting a lower layer with positive probability."""
    out = {}
    for q, i in attr.layer.items():
        if i == 0:
            continue
        lower = frozenset(p for p, j in attr.layer.items() if j < i)
        out[q] = next(a for a, row in enumerate(g.supp[q]) if all(x & lower for x in row))
    return out


def induces_subgame(g: Game, s: Iterable[int]) -> bool:
    s = frozenset(s)
    return all(any(x <= s for row in g.supp[q] for x in row) for q in s)


def restrict_subgame(g: Game, s: Iterable[int]) -> Game:
    """G restricted to s, redirecting exits to the first staying choice."""
    s = frozenset(s)
    if s == g.all_states:
        return g
    if not s:
        raise GameError("cannot restrict to the empty set")
    for q in sorted(s):
        if not any(x <= s for row in g.supp[q] for x in row):
            raise GameError(f"set does not induce a subgame: state {g.states[q]} cannot stay")
    keep = sorted(s)
    new = {q: i for i, q in enumerate(keep)}

    def relabel(d):
        return Distribution({new[p]: w for p, w in d.items()})

    rows = []
    for q in keep:
        stay = [[b for b, x in enumerate(row) if x <= s] for row in g.supp[q]]
        a_q = next(a for a in range(g.m) if stay[a])
        per_a = []
        for a in range(g.m):
            src = a if stay[a] else a_q
            b_a = stay[src][0]
            per_a.append(tuple(relabel(g.delta[q][src][b if b in stay[src] else b_a])
                               for b in range(g.m)))
        rows.append(tuple(per_a))
    coords = None if g.coords is None else tuple(g.coords[q] for q in keep)
    return Game(tuple(g.states[q] for q in keep), g.actions, tuple(rows),
                frozenset(new[q] for q in g.target & s), coords, g.period, g.base_states)


def is_trap(g: Game, player: int, s: Iterable[int]) -> bool:
    """Player-1 trap: player 2 can keep play in s; player-2 trap: player 1 can."""
    s = frozenset(s)
    if player == 1:
        return all(all(any(x <= s for x in row) for row in g.supp[q]) for q in s)
    if player == 2:
        return all(any(all(x <= s for x in row) for row in g.supp[q]) for q in s)
    raise ValueError(f"player must be 1 or 2, got {player}")


def product(g: Game, r: int, cap: int = MAX_PRODUCT_STATES) -> Game:
    """G x [r]: state index c*n + q is named 'q@c'; every step decrements c."""
    if g.coords is not None:
        raise GameError("product expects a base game")
    if r < 1:
        raise GameError("period must be positive")
    if r * g.n > cap:
        raise CapExceeded(f"product of {g.n} states with period {r} exceeds {cap} states")
    n = g.n
    rows = []
    for c in range(r):
        prev = (c - 1) % r
        for q in range(n):
            rows.append(tuple(tuple(Distribution({prev * n + p: w for p, w in d.items()})
                                    for d in row) for row in g.delta[q]))
    return Game(tuple(f"{g.states[q]}@{c}" for c in range(r) for q in range(n)),
                g.actions, tuple(rows), frozenset(q for q in g.target),
                tuple((q, c) for c in range(r) for q in range(n)), r, g.states)


def expand_set(s: Iterable[tuple], p: int, r: int) -> frozenset:
    """r-expansion of a set of (state, counter) pairs at period p."""
    if r % p:
        raise GameError(f"period {p} does not divide {r}")
    return frozenset((q, c + j * p) for q, c in s for j in range(r // p))


def to_index(h: Game, pairs: Iterable[tuple]) -> frozenset:
    """Indices in h of the given (state, counter) pairs that h contains."""
    ci = h.coord_index
    return frozenset(ci[x] for x in pairs if x in ci)


def to_pairs(h: Game, idx: Iterable[int]) -> frozenset:
    if h.coords is None:
        return frozenset((q, 0) for q in idx)
    return frozenset(h.coords[i] for i in idx)


def pair_names(base: Game, pairs: Iterable[tuple]) -> list:
    return [f"{base.states[q]}@{c}" for q, c in sorted(pairs, key=lambda x: (x[1], x[0]))]
