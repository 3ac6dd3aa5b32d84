"""Strategy objects and synthesis, bound formulas, and the substitution game."""
from __future__ import annotations

import json
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .core import Distribution, Game, GameError, parse_rational
from .operators import expand_set, pos_attractor, pos_attractor_strategy, to_index, to_pairs
from .simulate import Counting, Memoryless, Memoryless2, Superposition, Uniform, support_sequence
from .solver import (MAX_PERIOD, ElseRecord, SolveCertificate, ThenRecord, _Arenas,
                     certificate_steps, cpre_chain)
from .statebased import almost_sure_reach
from .subsets import reachable_subsets, scc_periods

SPOIL_CAP = 6


# ------------------------------------------------------------ selector lassos

@dataclass(frozen=True)
class SelectorLasso:
    """Pure counting strategy (prefix . cycle^omega)[i](q)."""

    prefix: tuple
    cycle: tuple

    def __post_init__(self):
        if not self.cycle:
            raise GameError("a lasso needs a nonempty cycle")

    def selector(self, i: int) -> tuple:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.cycle[(i - len(self.prefix)) % len(self.cycle)]

    def choice(self, i: int, q: int) -> Distribution:
        return Distribution.dirac(self.selector(i)[q])

    def to_json(self, g: Game) -> dict:
        row = lambda alpha: {g.states[q]: g.actions[a] for q, a in enumerate(alpha)}
        return {"kind": "lasso", "prefix": [row(a) for a in self.prefix],
                "cycle": [row(a) for a in self.cycle]}


def _witness(g: Game, q: int, target: frozenset) -> int:
    return next(a for a, row in enumerate(g.supp[q]) if all(s <= target for s in row))


def _path(graph, src, dst, allowed=None) -> list:
    """Selectors along a shortest nonempty path src -> dst in the subset graph."""
    prev = {}
    queue = deque([src])
    seen = set()
    while queue:
        v = queue.popleft()
        for w, alpha in graph.edges[v].items():
            if allowed is not None and w not in allowed:
                continue
            if w not in seen:
                seen.add(w)
                prev[w] = (v, alpha)
                if w == dst:
                    out = []
                    while w != src or not out:
                        v, alpha = prev[w]
                        out.append(alpha)
                        w = v
                        if w == src:
                            break
                    return out[::-1]
                queue.append(w)
    raise GameError("no path in the subset graph")


def synth_sure_strategy(g: Game, t: Iterable[int], mode: str, q: int) -> SelectorLasso:
    """Selector lasso witnessing sure eventually or weakly synchronization from q."""
    t = frozenset(t)
    idle = tuple([0] * g.n)
    if mode == "eventually":
        chain = cpre_chain(g, t)
        depth = next((i for i, s in enumerate(chain) if q in s), None)
        if depth is None:
            raise GameError(f"{g.states[q]} is not sure-winning for eventually")
        prefix = []
        for j in range(depth):
            here, there = chain[depth - j], chain[depth - j - 1]
            prefix.append(tuple(_witness(g, p, there) if p in here else 0 for p in range(g.n)))
        return SelectorLasso(tuple(prefix), (idle,))
    if mode == "weakly":
        start = frozenset([q])
        graph = reachable_subsets(g, [start])
        best = None
        for comp, _ in scc_periods(graph):
            for v in comp:
                if v <= t and (best is None or (-len(v), sorted(v)) < (-len(best[0]), sorted(best[0]))):
                    best = (v, comp)
        if best is None:
            raise GameError(f"{g.states[q]} is not sure-winning for weakly")
        v, comp = best
        prefix = [] if v == start else _path(graph, start, v)
        cycle = _path(graph, v, v, allowed=comp)
        return SelectorLasso(tuple(prefix), tuple(cycle))
    raise GameError(f"no selector lasso for mode {mode!r}")


# ------------------------------------------- almost-sure weakly strategies

@dataclass
class _Piece:
    """One region X_j of the final decomposition, at its own period."""

    r: int
    k: int
    layers: tuple       # V_0 .. V_{k+r} as pair sets at period r
    W: frozenset
    X: frozenset
    arena: Game
    levels: list        # [(parent, child states)] from the arena up to the product
    reach: dict
    attract: dict
    _cache: dict = field(default_factory=dict)

    def hub(self, c: int) -> frozenset:
        for i in range(self.k, self.k + self.r):
            if i % self.r == c:
                return self.layers[i]
        return frozenset()

    def witness(self, x: tuple, target: frozenset) -> int | None:
        key = (x, target)
        if key not in self._cache:
            h = self.arena
            xi, ti = h.coord_index[x], to_index(h, target)
            self._cache[key] = next((a for a, row in enumerate(h.supp[xi])
                                     if all(s <= ti for s in row)), None)
        return self._cache[key]

    def real_action(self, x: tuple, a: int) -> int:
        """Undo the subgame redirections of each nesting level."""
        for parent, kept in self.levels:
            xi = parent.coord_index[x]
            stays = lambda b: any(s <= kept for s in parent.supp[xi][b])
            if not stays(a):
                a = next(b for b in range(parent.m) if stays(b))
        return a


class AsWeaklyStrategy:
    """Pure counting strategy over the final product, built from a certificate.

    Rounds are grouped into blocks whose ends fall on counter 0. Inside a
    block, mass in a core region W_j runs the almost-sure reach strategy
    toward the hub, circles the hub, and descends into U x {0} when the
    remaining rounds match the preperiod. Outside W_j but inside X_j it plays
    the positive-attractor action.
    """

    def __init__(self, g: Game, period: int, final_S: frozenset, pieces: list,
                 schedule: list):
        self.game = g
        self.period = period
        self.final_S = final_S
        self.pieces = pieces
        self.schedule = list(schedule)
        self._ends: dict = {}

    def start_counter(self, support: Iterable[int]) -> int | None:
        support = frozenset(support)
        for c in range(self.period):
            if all((q, c) in self.final_S for q in support):
                return c
        return None

    def _block_ends(self, c0: int, upto: int) -> list:
        """Block ends: each block starts at the previous end and is padded to counter 0."""
        ends = self._ends.setdefault(c0, [])
        while not ends or ends[-1] <= upto:
            n = self.schedule[min(len(ends), len(self.schedule) - 1)]
            e = (ends[-1] if ends else 0) + n
            ends.append(e + (c0 - e) % self.period)
        return ends

    def remaining(self, i: int, c0: int) -> int:
        ends = self._block_ends(c0, i)
        return next(e for e in ends if e > i) - i

    def action(self, i: int, x: tuple, c0: int = 0) -> int:
        q, c = x
        for piece in self.pieces:
            y = (q, c % piece.r)
            if y not in piece.X:
                continue
            if y not in piece.W:
                return piece.real_action(y, piece.attract[y])
            rho = self.remaining(i, c0)
            k, r = piece.k, piece.r
            if rho < k + r:
                level = rho
            else:
                level = k + (rho - k) % r
                level = level + r if level == k else level
            if y in piece.layers[level]:
                a = piece.witness(y, piece.layers[level - 1])
                if a is not None:
                    return piece.real_action(y, a)
            hub = piece.hub(y[1])
            if y in hub:
                prev = piece.hub((y[1] - 1) % r)
                a = piece.witness(y, prev)
                if a is not None:
                    return piece.real_action(y, a)
            if y in piece.reach:
                return piece.real_action(y, piece.reach[y])
            a = piece.witness(y, piece.W)
            return piece.real_action(y, a if a is not None else 0)
        return 0

    def for_start(self, c0: int) -> Counting:
        """Counting strategy on the base game for mass starting at counter c0."""
        r = self.period
        return Counting(lambda i, q: self.action(i, (q, (c0 - i) % r), c0))

    def table(self, horizon: int, c0: int = 0) -> list:
        r = self.period
        return [{(q, (c0 - i) % r): self.action(i, (q, (c0 - i) % r), c0)
                 for q in range(self.game.n)} for i in range(horizon)]


def as_weakly_strategy(cert: SolveCertificate, g: Game, schedule=None,
                       t: Iterable[int] | None = None,
                       max_period: int = MAX_PERIOD) -> AsWeaklyStrategy:
    t = g.target if t is None else frozenset(t)
    if not cert.final_S:
        raise GameError("the certificate has an empty winning region")
    steps = certificate_steps(g, t, cert, max_period)
    last_else = max((i for i, s in enumerate(steps) if isinstance(s[0], ElseRecord)), default=-1)
    arenas = _Arenas(g, max_period)
    pieces = []
    for rec, r, S, K, h in steps[last_else + 1:-1]:
        if not isinstance(rec, ThenRecord):
            continue
        sc = rec.scheme
        layers = tuple(frozenset((q, i % r) for q, _ in v) for i, v in enumerate(sc.trace))
        reach = almost_sure_reach(h, to_index(h, layers[sc.k])).bound.strategy
        attr = pos_attractor(h, 1, to_index(h, rec.W))
        attract = pos_attractor_strategy(h, attr)
        levels = []
        whole = arenas.product(r)
        mid = arenas.get(r, S)
        levels.append((mid, to_index(mid, K)))
        levels.append((whole, to_index(whole, S)))
        pieces.append(_Piece(r, sc.k, layers, rec.W, rec.X, h, levels,
                             {h.coords[x]: a for x, a in reach.items()},
                             {h.coords[x]: a for x, a in attract.items()}))
    need = max(p.k for p in pieces) if pieces else 0
    if schedule is None:
        schedule = [max(4, need + 1) << i for i in range(16)]
    schedule = list(schedule)
    if not schedule or any(n <= 0 for n in schedule) or any(
            b <= a for a, b in zip(schedule, schedule[1:])):
        raise GameError("schedule must be a nonempty increasing list of positive lengths")
    if schedule[0] < need:
        raise GameError(f"schedule too short for alignment: first block {schedule[0]} < {need}")
    return AsWeaklyStrategy(g, cert.final_period, cert.final_S, pieces, schedule)


def certificate_adversary(cert: SolveCertificate, g: Game) -> Memoryless2:
    """Uniform at base states met by some ELSE record, first action elsewhere."""
    hot = {q for rec in cert.iterations if isinstance(rec, ElseRecord) for q, _ in rec.L}
    return Memoryless2({q: Distribution.uniform(range(g.m)) if q in hot else Distribution.dirac(0)
                        for q in range(g.n)})


# ------------------------------------------------------------ strategy JSON

def _action(g: Game, name) -> int:
    if name not in g.action_index:
        raise GameError(f"unknown action {name!r}")
    return g.action_index[name]


def _action_dist(g: Game, v) -> Distribution:
    if isinstance(v, dict) and "mix" in v:
        return Distribution({_action(g, a): parse_rational(p) for a, p in v["mix"].items()})
    return Distribution.dirac(_action(g, v))


def _state(g: Game, name) -> int:
    if name not in g.index:
        raise GameError(f"unknown state {name!r}")
    return g.index[name]


def strategy_from_json(g: Game, obj, player: int = 1):
    if isinstance(obj, str):
        obj = json.loads(obj)
    kind = obj.get("kind")
    if kind == "uniform" and player == 2:
        return Uniform()
    if kind == "lasso" and player == 1:
        sel = lambda row: tuple(_action(g, row[s]) if s in row else 0 for s in g.states)
        return SelectorLasso(tuple(sel(r) for r in obj.get("prefix", [])),
                             tuple(sel(r) for r in obj["cycle"]))
    if kind == "memoryless":
        table = obj.get("table", {})
        if player == 1:
            return Memoryless({_state(g, q): _action_dist(g, a) for q, a in table.items()})
        out = {}
        for q, v in table.items():
            if isinstance(v, dict) and "mix" not in v:
                for a, b in v.items():
                    out[(_state(g, q), _action(g, a))] = _action_dist(g, b)
            else:
                out[_state(g, q)] = _action_dist(g, v)
        return Memoryless2(out)
    if kind == "superposition" and player == 2:
        return Superposition([(parse_rational(p["weight"]), strategy_from_json(g, p["strategy"], 2))
                              for p in obj["parts"]])
    raise GameError(f"unsupported player-{player} strategy kind {kind!r}")


# ---------------------------------------------------------------- bounds

@dataclass(frozen=True)
class SpoilBounds:
    epsilonW: Fraction
    NW: int


def spoil_bounds(g: Game | int, eta=None, cap: int = SPOIL_CAP) -> SpoilBounds:
    """Token-spoiling constants for a game, or for given n and eta."""
    if isinstance(g, Game):
        n, eta = g.n, g.eta
    else:
        n, eta = int(g), Fraction(eta)
    if n < 1 or not 0 < eta <= 1:
        raise GameError("need n >= 1 and 0 < eta <= 1")
    if n > cap:
        raise GameError(f"n = {n} exceeds the bound cap {cap}")
    nw = 4 ** n
    inner = Fraction(eta) ** ((n + 1) * 2 ** n) / (n * nw)
    return SpoilBounds(Fraction(1, 2 * n) * inner ** (2 ** n), nw)


# ------------------------------------------------------- substitution game

@dataclass
class SubstitutionState:
    M: list                       # roster, in order of first appearance
    f: dict                       # player -> passes left
    reserveUsed: int = 0


@dataclass(frozen=True)
class SubstitutionReport:
    sustained: bool
    steps: int
    depleted_at: int | None
    max_team: int
    invariant_ok: bool
    trace: tuple = ()


def all_pass(state: SubstitutionState) -> set:
    return {p for p in state.M if state.f[p] >= 1}


def never_pass(state: SubstitutionState) -> set:
    return set()


def random_adversary(seed: int, p: float = 0.5) -> Callable:
    rng = random.Random(seed)
    return lambda state: {x for x in state.M if state.f[x] >= 1 and rng.random() < p}


def _invariant(state: SubstitutionState, N: int) -> bool:
    vals = sorted(state.f[p] for p in state.M)
    k = len(vals)
    return all(v <= N + 1 - k + i for i, v in enumerate(vals))


def substitution_game(N: int, K: int, adversary: Callable, steps: int,
                      record: bool = False) -> SubstitutionReport:
    """Run the coach rule against a pass policy; depletion means |M| > K."""
    state = SubstitutionState([], {})
    ok = _invariant(state, N)
    trace = []
    max_team = 0
    for step in range(steps):
        P = set(adversary(state))
        if any(p not in state.M or state.f[p] < 1 for p in P):
            raise GameError("adversary passed with an exhausted or unknown player")
        free = [p for p in state.M if p not in P]
        if free:
            best = max(state.f[p] for p in free)
            pick = next(p for p in free if state.f[p] == best)
        else:
            pick = len(state.M)
            state.M.append(pick)
            state.reserveUsed += 1
        for p in P:
            state.f[p] -= 1
        state.f[pick] = N
        ok = ok and _invariant(state, N)
        max_team = max(max_team, len(state.M))
        if record:
            trace.append((tuple(sorted(P)), pick, dict(state.f)))
        if len(state.M) > K:
            return SubstitutionReport(False, step + 1, step + 1, max_team, ok, tuple(trace))
    return SubstitutionReport(True, steps, None, max_team, ok, tuple(trace))
