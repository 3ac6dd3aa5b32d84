"""Exact outcome sequences under counting strategies."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import CapExceeded, Distribution, Game, GameError
from .subsets import selector_image

HORIZON_CAP = 100_000
SYNC_MODES = ("always", "eventually", "weakly", "strongly")


# ------------------------------------------------------------ strategies
# Player 1 strategies expose choice(i, q) -> Distribution over actions.
# Player 2 strategies expose choice(i, q, a) -> Distribution over actions.

class Memoryless:
    """Player-1 table q -> action or action distribution; unlisted states play 0."""

    def __init__(self, table: dict):
        self.table = {q: _as_dist(a) for q, a in table.items()}

    def choice(self, i: int, q: int) -> Distribution:
        return self.table.get(q, Distribution.dirac(0))


class Counting:
    """Player-1 strategy given by a function of (round, state)."""

    def __init__(self, fn):
        self.fn = fn

    def choice(self, i: int, q: int) -> Distribution:
        return _as_dist(self.fn(i, q))


class Uniform:
    """The uniform player-2 strategy tau_u."""

    def choice(self, i: int, q: int, a: int, m: int = 0) -> Distribution:
        return Distribution.uniform(range(m))


class Memoryless2:
    """Player-2 table keyed by state or by (state, p1 action); missing keys play 0."""

    def __init__(self, table: dict):
        self.table = {k: _as_dist(b) for k, b in table.items()}

    def choice(self, i: int, q: int, a: int, m: int = 0) -> Distribution:
        if (q, a) in self.table:
            return self.table[(q, a)]
        return self.table.get(q, Distribution.dirac(0))


class Counting2:
    def __init__(self, fn):
        self.fn = fn

    def choice(self, i: int, q: int, a: int, m: int = 0) -> Distribution:
        return _as_dist(self.fn(i, q, a))


@dataclass
class Superposition:
    """Weighted mixture of player-2 strategies, simulated copy by copy."""

    parts: list  # [(weight, strategy)]

    def __post_init__(self):
        self.parts = [(Fraction(w), s) for w, s in self.parts]
        if any(w <= 0 for w, _ in self.parts) or sum(w for w, _ in self.parts) != 1:
            raise GameError("superposition weights must be positive and sum to 1")


def _as_dist(x) -> Distribution:
    return x if isinstance(x, Distribution) else Distribution.dirac(int(x))


# --------------------------------------------------------------- outcomes

@dataclass
class OutcomeSequence:
    steps: list = field(default_factory=list)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def mass(self, t: Iterable[int]) -> list:
        t = frozenset(t)
        return [d.mass_of(t) for d in self.steps]

    def supports(self) -> list:
        return [d.support for d in self.steps]

    def to_csv(self, g: Game, t: Iterable[int]) -> str:
        lines = ["round," + ",".join(g.states) + ",target"]
        for i, (d, m) in enumerate(zip(self.steps, self.mass(t))):
            row = [str(d.get(q, Fraction(0))) for q in range(g.n)]
            lines.append(f"{i}," + ",".join(row) + f",{m}")
        return "\n".join(lines) + "\n"


def _step(g: Game, d: Distribution, i: int, sigma, tau) -> Distribution:
    out = defaultdict(Fraction)
    for q, w in d.items():
        for a, pa in sigma.choice(i, q).items():
            for b, pb in tau.choice(i, q, a, g.m).items():
                for p, pq in g.delta[q][a][b].items():
                    out[p] += w * pa * pb * pq
    return Distribution(out)


def outcome_sequence(g: Game, sigma, tau, d0: Distribution, horizon: int,
                     cap: int = HORIZON_CAP) -> OutcomeSequence:
    """d_0 .. d_horizon, exactly."""
    if horizon < 0:
        raise GameError("horizon must be nonnegative")
    if horizon > cap:
        raise CapExceeded(f"horizon {horizon} exceeds the cap {cap}")
    if not hasattr(sigma, "choice"):
        raise GameError(f"unsupported player-1 strategy {type(sigma).__name__}")
    if isinstance(tau, Superposition):
        copies = [(w, outcome_sequence(g, sigma, s, d0, horizon, cap)) for w, s in tau.parts]
        steps = []
        for i in range(horizon + 1):
            acc = defaultdict(Fraction)
            for w, seq in copies:
                for q, p in seq.steps[i].items():
                    acc[q] += w * p
            steps.append(Distribution(acc))
        return OutcomeSequence(steps)
    if not hasattr(tau, "choice"):
        raise GameError(f"unsupported player-2 strategy {type(tau).__name__}")
    steps = [d0]
    for i in range(horizon):
        steps.append(_step(g, steps[-1], i, sigma, tau))
    return OutcomeSequence(steps)


def support_sequence(g: Game, lasso, seed: Iterable[int], horizon: int) -> list:
    """s_0 = seed, s_{i+1} = image of s_i under the i-th selector."""
    out = [frozenset(seed)]
    for i in range(horizon):
        out.append(selector_image(g, out[-1], lasso.selector(i)))
    return out


def project(h: Game, d: Distribution) -> Distribution:
    """Push a distribution over product states down to base states."""
    out = defaultdict(Fraction)
    for x, w in d.items():
        out[h.coords[x][0]] += w
    return Distribution(out)


# ---------------------------------------------------------------- verdicts

@dataclass(frozen=True)
class SyncReport:
    mode: str
    epsilon: Fraction
    horizon: int
    holds: bool
    witness: int | None
    indices: tuple
    bounded: bool  # True when the verdict only approximates an infinitary mode

    def to_json(self) -> dict:
        return {"mode": self.mode, "epsilon": str(self.epsilon), "horizon": self.horizon,
                "holds": self.holds, "witness": self.witness, "indices": list(self.indices),
                "horizonBounded": self.bounded}


def check_sync(seq: OutcomeSequence | Sequence[Distribution], t: Iterable[int],
               mode: str, eps=0) -> SyncReport:
    if mode not in SYNC_MODES:
        raise GameError(f"unknown mode {mode!r}")
    steps = seq.steps if isinstance(seq, OutcomeSequence) else list(seq)
    eps = Fraction(eps)
    t = frozenset(t)
    good = tuple(i for i, d in enumerate(steps) if d.mass_of(t) >= 1 - eps)
    horizon = len(steps) - 1
    if mode == "always":
        holds = len(good) == len(steps)
        witness = None if holds else next(i for i in range(len(steps)) if i not in good)
    elif mode == "eventually":
        holds = bool(good)
        witness = good[0] if good else None
    elif mode == "weakly":
        holds = bool(good)
        witness = good[-1] if good else None
    else:
        start = len(steps)
        while start > 0 and start - 1 in good:
            start -= 1
        holds = start < len(steps)
        witness = start if holds else None
    return SyncReport(mode, eps, horizon, holds, witness, good, mode != "eventually")
