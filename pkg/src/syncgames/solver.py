"""Winning regions for synchronizing objectives in sure and almost-sure modes."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .core import CapExceeded, Distribution, Game, GameError, InvariantViolation
from .operators import (attractor, cpre, expand_set, pair_names, pos_attractor,
                        product, restrict_subgame, to_index, to_pairs)
from .statebased import almost_sure_cobuchi, almost_sure_reach, sure_safety
from .subsets import VERTEX_BUDGET, find_accepting_scc, reachable_subsets, sure_weakly_supports

MODES = ("always", "eventually", "weakly", "strongly")
MAX_PERIOD = 1 << 12


def maximal_sets(sets: Iterable[frozenset]) -> list:
    """Antichain of inclusion-maximal nonempty sets, in canonical order."""
    uniq = sorted({frozenset(s) for s in sets if s}, key=lambda s: (-len(s), sorted(s)))
    out = []
    for s in uniq:
        if not any(s <= m for m in out):
            out.append(s)
    return out


@dataclass
class WinRegion:
    winning_diracs: frozenset
    maximal_supports: list
    period: int = 1
    certificate: "SolveCertificate | None" = None
    cpre_chain: list | None = None  # sure-eventually witness sets

    def contains_support(self, s: Iterable[int]) -> bool:
        s = frozenset(s)
        return bool(s) and any(s <= m for m in self.maximal_supports)

    def to_json(self, g: Game) -> dict:
        out = {"winning": g.names(self.winning_diracs),
               "maximal_supports": [g.names(m) for m in self.maximal_supports],
               "period": self.period}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json(g)
        return out


def _region(sets: Iterable[frozenset], period: int = 1, **kw) -> WinRegion:
    maxi = maximal_sets(sets)
    diracs = frozenset().union(*maxi) if maxi else frozenset()
    return WinRegion(diracs, maxi, period, **kw)


# ------------------------------------------------------------ sure modes

def cpre_chain(g: Game, t: Iterable[int]) -> list:
    """t, CPre(t), CPre^2(t), ... up to the first repeated set."""
    chain = [frozenset(t)]
    seen = {chain[0]}
    while True:
        nxt = cpre(g, chain[-1])
        if nxt in seen:
            return chain
        seen.add(nxt)
        chain.append(nxt)


def sure_strongly_region(g: Game, t: Iterable[int]) -> frozenset:
    """States from which every play reaches the sure-safety core in bounded time."""
    return attractor(g, sure_safety(g, t)).region


def _all_supports(g: Game, budget: int) -> list:
    if (1 << g.n) - 1 > budget:
        raise CapExceeded(f"{g.n} states exceed the subset vertex budget {budget}")
    return [frozenset(c) for k in range(g.n, 0, -1) for c in combinations(range(g.n), k)]


def solve_sure(g: Game, t: Iterable[int], mode: str, budget: int = VERTEX_BUDGET) -> WinRegion:
    t = frozenset(t)
    if mode == "always":
        return _region([sure_safety(g, t)])
    if mode == "eventually":
        chain = cpre_chain(g, t)
        return _region(chain, cpre_chain=chain)
    if mode == "weakly":
        graph = reachable_subsets(g, _all_supports(g, budget), budget)
        return _region(sure_weakly_supports(g, t, graph))
    if mode == "strongly":
        return _region([sure_strongly_region(g, t)])
    raise GameError(f"unknown mode {mode!r}")


# ------------------------------------------------------- periodic schemes

@dataclass(frozen=True)
class PeriodicScheme:
    R: frozenset      # base states of the hub
    r: int            # period of the hub
    k: int            # preperiod
    trace: tuple      # V_0 .. V_{k+r} as sets of (state, counter) pairs

    @property
    def empty(self) -> bool:
        return not self.R


def periodic_scheme(h: Game, U: Iterable[int], placement: int = 0) -> PeriodicScheme:
    """Iterate CPre in h from U x {placement} until a set repeats.

    h is a product game (or a restriction of one); U holds base states.
    """
    U = frozenset(U)
    if not U:
        raise GameError("periodic scheme needs a nonempty set")
    v0 = to_index(h, ((q, placement) for q in U))
    if len(v0) != len(U):
        raise GameError("U x {placement} is not inside the arena")
    base_n = len(h.base_states) if h.base_states is not None else h.n
    cap = (1 << base_n) * h.period + 1
    trace = [v0]
    seen = {v0: 0}
    while True:
        if not trace[-1]:
            pairs = tuple(to_pairs(h, v) for v in trace)
            return PeriodicScheme(frozenset(), 0, len(trace) - 1, pairs)
        if len(trace) > cap:
            raise InvariantViolation("periodic scheme exceeded its iteration bound")
        nxt = cpre(h, trace[-1])
        if nxt in seen:
            k = seen[nxt]
            r = len(trace) - k
            trace.append(nxt)
            pairs = tuple(to_pairs(h, v) for v in trace)
            counters = {c for _, c in pairs[k]}
            if len(counters) != 1:
                raise InvariantViolation("hub spans several counters")
            return PeriodicScheme(frozenset(q for q, _ in pairs[k]), r, k, pairs)
        seen[nxt] = len(trace)
        trace.append(nxt)


# ----------------------------------------------------- algorithm state

@dataclass(frozen=True)
class ThenRecord:
    U: frozenset
    placement: int
    scheme: PeriodicScheme
    r_new: int
    W: frozenset  # (state, counter) pairs at period r_new
    X: frozenset


@dataclass(frozen=True)
class ElseRecord:
    K: frozenset
    L: frozenset
    r: int


@dataclass
class SolveCertificate:
    iterations: list
    final_period: int
    final_S: frozenset
    disagreements: list = field(default_factory=list)

    def to_json(self, g: Game) -> dict:
        its = []
        for rec in self.iterations:
            if isinstance(rec, ThenRecord):
                sc = rec.scheme
                its.append({"kind": "THEN", "U": g.names(rec.U), "placement": rec.placement,
                            "scheme": {"R": g.names(sc.R), "r": sc.r, "k": sc.k,
                                       "trace": [pair_names(g, v) for v in sc.trace]},
                            "r_new": rec.r_new, "W": pair_names(g, rec.W),
                            "X": pair_names(g, rec.X)})
            else:
                its.append({"kind": "ELSE", "period": rec.r, "K": pair_names(g, rec.K),
                            "L": pair_names(g, rec.L)})
        out = {"iterations": its, "finalPeriod": self.final_period,
               "finalS": pair_names(g, self.final_S)}
        if self.disagreements:
            out["disagreements"] = self.disagreements
        return out


class _Arenas:
    """Cached products and nested restrictions product(g, r) | S | K."""

    def __init__(self, g: Game, max_period: int):
        self.g = g
        self.max_period = max_period
        self._cache: dict = {}

    def product(self, r: int) -> Game:
        if r > self.max_period:
            raise CapExceeded(f"period {r} exceeds the cap {self.max_period}")
        key = (r,)
        if key not in self._cache:
            self._cache[key] = product(self.g, r, cap=self.max_period * self.g.n)
        return self._cache[key]

    def get(self, r: int, S: frozenset, K: frozenset | None = None) -> Game:
        key = (r, S, K)
        if key not in self._cache:
            if K is None:
                h = self.product(r)
                self._cache[key] = restrict_subgame(h, to_index(h, S))
            else:
                h = self.get(r, S)
                self._cache[key] = restrict_subgame(h, to_index(h, K))
        return self._cache[key]


def _candidates(t: frozenset, K: frozenset) -> list:
    base = sorted(q for q in t if (q, 0) in K)
    return [frozenset(c) for k in range(len(base), 0, -1) for c in combinations(base, k)]


def _as_reach_pairs(h: Game, target_pairs) -> frozenset:
    return to_pairs(h, almost_sure_reach(h, to_index(h, target_pairs)).region)


def is_self_recurrent(g: Game, U: Iterable[int], scheme: PeriodicScheme, r: int,
                      S: frozenset, K: frozenset, arenas: _Arenas | None = None,
                      full: bool = False):
    """Least placement t with U x {t} almost-surely reaching the hub, or None.

    S and K are (state, counter) sets at period r; with ``full`` the test
    runs in the unrestricted product instead of the arena.
    """
    U = frozenset(U)
    if scheme.empty:
        return None
    arenas = arenas or _Arenas(g, MAX_PERIOD)
    rn = scheme.r
    Kx = expand_set(K, r, rn)
    if full:
        h = arenas.product(rn)
    else:
        h = arenas.get(rn, expand_set(S, r, rn), Kx)
    win = _as_reach_pairs(h, ((q, scheme.k % rn) for q in scheme.R))
    for c in range(rn):
        cell = {(q, c) for q in U}
        if cell <= Kx and cell <= win:
            return c
    return None


def solve_as_weakly(g: Game, t: Iterable[int], max_period: int = MAX_PERIOD,
                    check_full: bool = False) -> WinRegion:
    """Almost-sure weakly synchronizing region with its iteration certificate."""
    t = frozenset(t)
    arenas = _Arenas(g, max_period)
    r = 1
    S = frozenset((q, 0) for q in range(g.n))
    K = S
    records, disagreements = [], []
    limit = max(1, g.n * g.n)
    while K:
        if len(records) >= limit:
            raise InvariantViolation(f"more than {limit} iterations")
        found = None
        for U in _candidates(t, K):
            scheme = periodic_scheme(arenas.get(r, S, K), U, 0)
            if scheme.empty:
                continue
            placed = is_self_recurrent(g, U, scheme, r, S, K, arenas)
            if check_full:
                other = is_self_recurrent(g, U, scheme, r, S, K, arenas, full=True)
                if (placed is None) != (other is None):
                    disagreements.append({"U": g.names(U), "period": r,
                                          "arena": placed, "full": other})
            if placed is not None:
                found = (U, scheme, placed)
                break
        if found is not None:
            U, scheme, placed = found
            rn = scheme.r
            S, K = expand_set(S, r, rn), expand_set(K, r, rn)
            r = rn
            h = arenas.get(r, S, K)
            W = _as_reach_pairs(h, ((q, scheme.k % r) for q in scheme.R))
            X = to_pairs(h, pos_attractor(h, 1, to_index(h, W)).region)
            records.append(ThenRecord(U, placed, scheme, r, W, X))
            K = K - X
        else:
            h = arenas.get(r, S)
            L = to_pairs(h, pos_attractor(h, 2, to_index(h, K)).region)
            records.append(ElseRecord(K, L, r))
            S = S - L
            K = S
    cert = SolveCertificate(records, r, S, disagreements)
    return _region(slices(S, r), period=r, certificate=cert)


def slices(S: Iterable[tuple], r: int) -> list:
    out = [set() for _ in range(r)]
    for q, c in S:
        out[c].add(q)
    return [frozenset(s) for s in out]


def replay_certificate(g: Game, t: Iterable[int], cert: SolveCertificate,
                       max_period: int = MAX_PERIOD) -> frozenset:
    """Re-run the recorded iterations; raises on any mismatch, returns final S."""
    return certificate_steps(g, t, cert, max_period)[-1][2]


def certificate_steps(g: Game, t: Iterable[int], cert: SolveCertificate,
                      max_period: int = MAX_PERIOD) -> list:
    """Replay a certificate, returning (record, r, S, K, arena) per iteration.

    For a THEN record r, S and K are taken after the period change, so the
    arena is the one W and X live in. A last entry (None, r, S, frozenset(),
    None) holds the final state.
    """
    t = frozenset(t)
    steps = []
    arenas = _Arenas(g, max_period)
    r = 1
    S = frozenset((q, 0) for q in range(g.n))
    K = S
    for rec in cert.iterations:
        if not K:
            raise InvariantViolation("certificate continues after K became empty")
        if isinstance(rec, ThenRecord):
            if not rec.U <= t or any((q, 0) not in K for q in rec.U):
                raise InvariantViolation("recorded candidate is not admissible")
            scheme = periodic_scheme(arenas.get(r, S, K), rec.U, 0)
            if scheme != rec.scheme:
                raise InvariantViolation("periodic scheme differs")
            if is_self_recurrent(g, rec.U, scheme, r, S, K, arenas) != rec.placement:
                raise InvariantViolation("self-recurrence placement differs")
            S, K = expand_set(S, r, scheme.r), expand_set(K, r, scheme.r)
            r = scheme.r
            h = arenas.get(r, S, K)
            W = _as_reach_pairs(h, ((q, scheme.k % r) for q in scheme.R))
            X = to_pairs(h, pos_attractor(h, 1, to_index(h, W)).region)
            if (W, X, r) != (rec.W, rec.X, rec.r_new):
                raise InvariantViolation("W or X differs")
            steps.append((rec, r, S, K, h))
            K = K - X
        else:
            if rec.K != K:
                raise InvariantViolation("ELSE record K differs")
            h = arenas.get(r, S)
            L = to_pairs(h, pos_attractor(h, 2, to_index(h, K)).region)
            if L != rec.L:
                raise InvariantViolation("ELSE record L differs")
            steps.append((rec, r, S, K, h))
            S = S - L
            K = S
    if K or S != cert.final_S or r != cert.final_period:
        raise InvariantViolation("final state differs")
    steps.append((None, r, S, frozenset(), None))
    return steps


def self_recurrent_exists(g: Game, t: Iterable[int], max_period: int = MAX_PERIOD) -> bool:
    """Some nonempty U inside t is self-recurrent in the full game."""
    t = frozenset(t)
    arenas = _Arenas(g, max_period)
    full = frozenset((q, 0) for q in range(g.n))
    for U in _candidates(t, full):
        scheme = periodic_scheme(arenas.get(1, full), U, 0)
        if is_self_recurrent(g, U, scheme, 1, full, full, arenas) is not None:
            return True
    return False


# -------------------------------------------------- deterministic games

def solve_as_weakly_det(g: Game, t: Iterable[int], max_period: int = MAX_PERIOD,
                        budget: int = VERTEX_BUDGET) -> frozenset:
    """Winning Dirac states via accepting SCCs of the subset construction."""
    if not g.deterministic:
        raise GameError("solve_as_weakly_det needs a deterministic game")
    t = frozenset(t)
    arenas = _Arenas(g, max_period)
    k = 1
    S = frozenset((q, 0) for q in range(g.n))
    won = set()
    measure = g.n + 1
    for _ in range(g.n + 1):
        target = frozenset((q, 0) for q in t) & S
        if not S or not target:
            return frozenset(won)
        h = arenas.get(k, S)
        found = find_accepting_scc(h, to_index(h, target), budget)
        if found is None:
            return frozenset(won)
        p = found.period
        if p % k:
            raise InvariantViolation(f"SCC period {p} is not a multiple of {k}")
        S = expand_set(S, k, p)
        k = p
        hp = arenas.get(k, S)
        U0 = to_pairs(h, found.U)
        W = to_pairs(hp, attractor(hp, to_index(hp, U0)).region)
        won.update(q for q, _ in W)
        S = S - W
        size = max((len(s) for s in slices(S, k)), default=0)
        if size >= measure:
            raise InvariantViolation("slice measure did not decrease")
        measure = size
    raise InvariantViolation("recursion deeper than the number of states")


# ------------------------------------------------------- dispatch

def solve_as(g: Game, t: Iterable[int], mode: str, max_period: int = MAX_PERIOD,
             budget: int = VERTEX_BUDGET) -> WinRegion:
    t = frozenset(t)
    if mode == "always":
        return solve_sure(g, t, "always")
    if mode == "strongly":
        return _region([almost_sure_cobuchi(g, t)])
    if mode == "weakly":
        return solve_as_weakly(g, t, max_period)
    if mode == "eventually":
        sure = solve_sure(g, t, "eventually")
        weak = solve_as_weakly(g, t, max_period)
        out = _region(sure.maximal_supports + weak.maximal_supports, period=weak.period,
                      certificate=weak.certificate, cpre_chain=sure.cpre_chain)
        return out
    raise GameError(f"unknown mode {mode!r}")


def solve(g: Game, t: Iterable[int], mode: str, win: str, **kw) -> WinRegion:
    if win == "sure":
        return solve_sure(g, t, mode, **{k: v for k, v in kw.items() if k == "budget"})
    if win == "almost-sure":
        return solve_as(g, t, mode, **kw)
    raise GameError(f"unknown winning mode {win!r}")


@dataclass(frozen=True)
class Membership:
    member: bool
    witness: dict


def membership(g: Game, t: Iterable[int], mode: str, win: str, d: Distribution,
               **kw) -> Membership:
    supp = d.support
    if not supp <= g.all_states:
        raise GameError("distribution support outside the state space")
    t = frozenset(t)
    if mode == "eventually" and win == "sure":
        chain = cpre_chain(g, t)
        for i, c in enumerate(chain):
            if supp <= c:
                return Membership(True, {"cpre_index": i})
        return Membership(False, {})
    region = solve(g, t, mode, win, **kw)
    for m in region.maximal_supports:
        if supp <= m:
            wit = {"maximal_support": g.names(m)}
            if mode == "eventually" and region.cpre_chain is not None:
                for i, c in enumerate(region.cpre_chain):
                    if supp <= c:
                        wit["cpre_index"] = i
                        break
            return Membership(True, wit)
    return Membership(False, {})
