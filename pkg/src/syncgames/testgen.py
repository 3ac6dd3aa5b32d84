"""Seeded random games and the MDP-to-game hardness reduction."""
from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable

from .core import Distribution, Game, GameError


def _random_dist(rng: random.Random, n: int, branching: int, granularity: int) -> Distribution:
    k = rng.randint(1, max(1, min(branching, n, granularity)))
    succ = rng.sample(range(n), k)
    cuts = sorted(rng.sample(range(1, granularity), k - 1)) if k > 1 else []
    parts = [b - a for a, b in zip([0] + cuts, cuts + [granularity])]
    return Distribution({q: Fraction(p, granularity) for q, p in zip(succ, parts)})


def random_game(seed: int, n: int, a: int = 2, branching: int = 2, granularity: int = 2,
                deterministic: bool = False, mdp: bool = False) -> Game:
    """A reproducible random game; ``mdp`` makes every state a player-1 state."""
    if n < 1 or a < 1:
        raise GameError("need at least one state and one action")
    rng = random.Random(seed)
    if deterministic:
        branching = 1
    rows = []
    for q in range(n):
        per_a = []
        for x in range(a):
            if mdp:
                d = _random_dist(rng, n, branching, granularity)
                per_a.append(tuple(d for _ in range(a)))
            else:
                per_a.append(tuple(_random_dist(rng, n, branching, granularity) for _ in range(a)))
        rows.append(tuple(per_a))
    target = frozenset(q for q in range(n) if rng.random() < 0.5) or frozenset([rng.randrange(n)])
    return Game(tuple(f"s{i}" for i in range(n)), tuple(str(i + 1) for i in range(a)),
                tuple(rows), target)


def is_mdp(g: Game) -> bool:
    return all(g.classify(q) in ("player-1", "both") for q in range(g.n))


def mdp_to_weakly_game(m: Game, t: Iterable[int], q0: int) -> tuple:
    """Turn probabilistic branching into player-2 choices and add a reset letter.

    Returns (game, new target). The last action is the reset letter; from a
    state of t it leads to the fresh target state, elsewhere to a sink, and
    the target state returns to q0 on every action.
    """
    if not is_mdp(m):
        raise GameError("expected an MDP: every state must be a player-1 state")
    t = frozenset(t)
    fan = max(len(m.delta[q][a][0]) for q in range(m.n) for a in range(m.m))
    width = max(m.m, fan)
    n = m.n
    hit, sink = n, n + 1
    actions = tuple(str(i + 1) for i in range(width)) + ("#",)
    rows = []
    for q in range(n):
        per_a = []
        for a in range(width + 1):
            if a == width:
                d = Distribution.dirac(hit if q in t else sink)
                per_a.append(tuple(d for _ in actions))
                continue
            src = m.delta[q][min(a, m.m - 1)][0]
            succ = sorted(src.support)
            per_a.append(tuple(Distribution.dirac(succ[min(b, len(succ) - 1)])
                               for b in range(width + 1)))
        rows.append(tuple(per_a))
    back = tuple(tuple(Distribution.dirac(q0) for _ in actions) for _ in actions)
    stay = tuple(tuple(Distribution.dirac(sink) for _ in actions) for _ in actions)
    rows += [back, stay]
    names = m.states + ("q#", "q_bot")
    return Game(names, actions, tuple(rows), frozenset([hit])), frozenset([hit])
