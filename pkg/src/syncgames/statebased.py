"""Qualitative solvers for state-based objectives and the brute-force oracle."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Sequence

from .core import CapExceeded, Distribution, Game
from .graphs import is_cyclic, reachable, tarjan
from .operators import apre, cpre

ORACLE_CAP = 10 ** 7
OBJECTIVES = ("as-reach", "sure-safety", "as-cobuchi", "sure-cobuchi")


@dataclass(frozen=True)
class RankMap:
    rank: dict     # state -> rank, defined on the losing states only
    spoiler: dict  # (state, action) -> player-2 action


@dataclass(frozen=True)
class ReachStrategyBound:
    strategy: dict  # state -> action, on the winning region outside t
    n: int
    eta: Fraction

    def horizon(self, eps: Fraction) -> int:
        """Least k with (1 - eta^n)^k <= eps, times n."""
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        miss = 1 - self.eta ** self.n
        k, acc = 0, Fraction(1)
        while acc > eps:
            acc *= miss
            k += 1
        return k * self.n


@dataclass(frozen=True)
class ReachResult:
    region: frozenset
    ranks: RankMap
    bound: ReachStrategyBound

    def __iter__(self):
        return iter((self.region, self.ranks, self.bound))


def _inner_layers(g: Game, t: frozenset, y: frozenset) -> list:
    """Iterates of muX. t | APre(y, X), starting from the empty set."""
    layers = [frozenset()]
    while True:
        nxt = t | apre(g, y, layers[-1])
        if nxt == layers[-1]:
            return layers
        layers.append(nxt)


def almost_sure_reach(g: Game, t: Iterable[int]) -> ReachResult:
    t = frozenset(t)
    ys = [g.all_states]
    while True:
        layers = _inner_layers(g, t, ys[-1])
        if layers[-1] == ys[-1]:
            break
        ys.append(layers[-1])
    region = ys[-1]

    rank, spoiler = {}, {}
    for i in range(len(ys) - 1):
        y_i, y_next = ys[i], ys[i + 1]
        for q in sorted(y_i - y_next):
            rank[q] = i
            for a, row in enumerate(g.supp[q]):
                spoiler[(q, a)] = next(b for b, s in enumerate(row)
                                       if not (s <= y_i and s & y_next))

    strategy = {}
    for j in range(2, len(layers)):
        for q in sorted(layers[j] - layers[j - 1]):
            strategy[q] = next(a for a, row in enumerate(g.supp[q])
                               if all(s <= region and s & layers[j - 1] for s in row))
    return ReachResult(region, RankMap(rank, spoiler), ReachStrategyBound(strategy, g.n, g.eta))


def sure_safety(g: Game, t: Iterable[int]) -> frozenset:
    x = frozenset(t)
    while True:
        nxt = x & cpre(g, x)
        if nxt == x:
            return x
        x = nxt


def safety_strategy(g: Game, core: frozenset) -> dict:
    return {q: next(a for a, row in enumerate(g.supp[q]) if all(s <= core for s in row))
            for q in sorted(core)}


def sure_cobuchi(g: Game, t: Iterable[int]) -> frozenset:
    """muX. nuY. (t & CPre(Y)) | CPre(X), branching resolved adversarially."""
    t = frozenset(t)
    x = frozenset()
    while True:
        cx = cpre(g, x)
        y = g.all_states
        while True:
            ny = (t & cpre(g, y)) | cx
            if ny == y:
                break
            y = ny
        if y == x:
            return x
        x = y


def _cobuchi_step(g: Game, t: frozenset, y: frozenset, x: frozenset, w: frozenset) -> frozenset:
    """Some action keeps every response inside y and, per response, hits x or stays in w (from t)."""
    def ok(q, row):
        return all(s <= y and (s & x or (q in t and s <= w)) for s in row)
    return frozenset(q for q in range(g.n) if any(ok(q, row) for row in g.supp[q]))


def almost_sure_cobuchi(g: Game, t: Iterable[int]) -> frozenset:
    """nuY. muX. nuW. step(Y, X, W).

    Per player-2 response the play either stays in t (inside W) or has a
    positive chance of reaching X; reaching the sure-safety core alone is not
    required, since player 2 may keep the play in t forever.
    """
    t = frozenset(t)
    y = g.all_states
    while True:
        x = frozenset()
        while True:
            w = y
            while True:
                nw = _cobuchi_step(g, t, y, x, w)
                if nw == w:
                    break
                w = nw
            if w == x:
                break
            x = w
        if x == y:
            return y
        y = x


# ---------------------------------------------------------------- oracle

def chain_bsccs(chain: Sequence[Distribution], start: Iterable[int]) -> list:
    """Bottom SCCs of a Markov chain reachable from start."""
    succ = lambda q: chain[q].support
    reach = reachable(start, succ)
    out = []
    for comp in tarjan(sorted(reach), succ):
        cs = frozenset(comp)
        if all(chain[q].support <= cs for q in cs):
            out.append(cs)
    return out


def reach_probabilities(chain: Sequence[Distribution], t: Iterable[int]) -> list:
    """Exact Pr(eventually t) from every state, by Gaussian elimination."""
    t = frozenset(t)
    n = len(chain)
    pred = {q: set() for q in range(n)}
    for q in range(n):
        for p in chain[q].support:
            pred[p].add(q)
    can = reachable(t, lambda q: pred[q])
    unknown = [q for q in range(n) if q in can and q not in t]
    pos = {q: i for i, q in enumerate(unknown)}
    m = len(unknown)
    rows = []
    for q in unknown:
        row = [Fraction(0)] * (m + 1)
        row[pos[q]] += 1
        for p, w in chain[q].items():
            if p in t:
                row[m] += w
            elif p in pos:
                row[pos[p]] -= w
        rows.append(row)
    for c in range(m):
        piv = next(r for r in range(c, m) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        inv = 1 / rows[c][c]
        rows[c] = [v * inv for v in rows[c]]
        for r in range(m):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[c])]
    out = [Fraction(0)] * n
    for q in t:
        out[q] = Fraction(1)
    for q in unknown:
        out[q] = rows[pos[q]][m]
    return out


def _verdict(g: Game, chain: list, q: int, t: frozenset, objective: str) -> bool:
    succ = lambda s: chain[s].support
    if objective == "as-reach":
        absorbing = [Distribution.dirac(s) if s in t else chain[s] for s in range(g.n)]
        return all(b <= t for b in chain_bsccs(absorbing, [q]))
    if objective == "as-cobuchi":
        return all(b <= t for b in chain_bsccs(chain, [q]))
    reach = reachable([q], succ)
    if objective == "sure-safety":
        return reach <= t
    if objective == "sure-cobuchi":
        bad = reach - t
        for comp in tarjan(sorted(reach), lambda s: [p for p in succ(s) if p in reach]):
            if bad.intersection(comp) and is_cyclic(comp, succ):
                return False
        return True
    raise ValueError(f"unknown objective {objective!r}")


def brute_force_statebased(g: Game, t: Iterable[int], objective: str,
                           cap: int = ORACLE_CAP) -> frozenset:
    """Winning region by enumerating pure memoryless strategies of both players."""
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    t = frozenset(t)
    pairs = g.m ** (2 * g.n)
    if pairs > cap:
        raise CapExceeded(f"{pairs} strategy pairs exceed the oracle cap {cap}")
    win = set()
    for sigma in cartesian(range(g.m), repeat=g.n):
        holds = set(range(g.n)) - win
        for tau in cartesian(range(g.m), repeat=g.n):
            if not holds:
                break
            chain = [g.delta[q][sigma[q]][tau[q]] for q in range(g.n)]
            holds = {q for q in holds if _verdict(g, chain, q, t, objective)}
        win |= holds
    return frozenset(win)
