"""Game model, exact distributions, validation and the JSON file format."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import Iterable, Iterator, Mapping, Sequence

StateSet = frozenset  # frozenset[int] of state indices

INSTANCES = ("gwin", "gwinp", "glose", "g7", "g10", "g13")


class GameError(ValueError):
    """Malformed game document or inconsistent input."""


class CapExceeded(RuntimeError):
    """A configured resource cap was hit."""


class InvariantViolation(AssertionError):
    """An internal consistency check failed."""


def parse_rational(text) -> Fraction:
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        return Fraction(text)
    if not isinstance(text, str):
        raise GameError(f"probability must be a 'num/den' string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise GameError(f"bad rational {text!r}") from exc


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


class Distribution(Mapping):
    """Exact probability vector over state indices; zero entries are dropped."""

    __slots__ = ("_mass", "_key")

    def __init__(self, mass: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]]):
        items = mass.items() if isinstance(mass, Mapping) else mass
        acc: dict[int, Fraction] = {}
        for q, p in items:
            p = Fraction(p)
            if p < 0:
                raise GameError(f"negative probability {p} on state {q}")
            if p:
                acc[q] = acc.get(q, Fraction(0)) + p
        total = sum(acc.values(), Fraction(0))
        if total != 1:
            raise GameError(f"distribution sums to {format_rational(total)}")
        self._mass = dict(sorted(acc.items()))
        self._key = tuple(self._mass.items())

    @classmethod
    def dirac(cls, q: int) -> "Distribution":
        return cls({q: Fraction(1)})

    @classmethod
    def uniform(cls, states: Iterable[int]) -> "Distribution":
        states = sorted(set(states))
        if not states:
            raise GameError("uniform distribution over an empty set")
        return cls({q: Fraction(1, len(states)) for q in states})

    def __getitem__(self, q: int) -> Fraction:
        return self._mass[q]

    def get(self, q, default=Fraction(0)):
        return self._mass.get(q, default)

    def __iter__(self) -> Iterator[int]:
        return iter(self._mass)

    def __len__(self) -> int:
        return len(self._mass)

    def __hash__(self) -> int:
        return hash(self._key)

    def __eq__(self, other) -> bool:
        if isinstance(other, Distribution):
            return self._key == other._key
        return NotImplemented

    def __repr__(self) -> str:
        body = ", ".join(f"{q}: {format_rational(p)}" for q, p in self._key)
        return f"Distribution({{{body}}})"

    @property
    def support(self) -> frozenset:
        return frozenset(self._mass)

    @property
    def is_dirac(self) -> bool:
        return len(self._mass) == 1

    def mass_of(self, s: Iterable[int]) -> Fraction:
        return sum((self._mass.get(q, Fraction(0)) for q in s), Fraction(0))


@dataclass(frozen=True)
class Game:
    """Turn-based stochastic game. ``delta[q][a][b]`` is a Distribution.

    ``coords`` is set on product games and their restrictions: the pair
    (base state index, counter) of every state, with ``period`` the counter
    modulus.
    """

    states: tuple
    actions: tuple
    delta: tuple
    target: frozenset
    coords: tuple | None = None
    period: int = 1
    base_states: tuple | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.states)

    @property
    def m(self) -> int:
        return len(self.actions)

    @cached_property
    def index(self) -> dict:
        return {name: i for i, name in enumerate(self.states)}

    @cached_property
    def action_index(self) -> dict:
        return {name: i for i, name in enumerate(self.actions)}

    @cached_property
    def supp(self) -> tuple:
        """supp[q][a][b]: support of delta(q,a,b)."""
        return tuple(tuple(tuple(d.support for d in row) for row in rows)
                     for rows in self.delta)

    @cached_property
    def image(self) -> tuple:
        """image[q][a]: union over b of the supports, as seen by player 1."""
        return tuple(tuple(frozenset().union(*row) for row in rows)
                     for rows in self.supp)

    @cached_property
    def coord_index(self) -> dict:
        if self.coords is None:
            return {(q, 0): q for q in range(self.n)}
        return {c: i for i, c in enumerate(self.coords)}

    @cached_property
    def eta(self) -> Fraction:
        return min(p for rows in self.delta for row in rows for d in row
                   for p in d.values())

    @property
    def all_states(self) -> frozenset:
        return frozenset(range(self.n))

    @cached_property
    def deterministic(self) -> bool:
        return all(d.is_dirac for rows in self.delta for row in rows for d in row)

    def classify(self, q: int) -> str:
        rows = self.delta[q]
        p1 = all(len(set(row)) == 1 for row in rows)
        p2 = all(len({rows[a][b] for a in range(self.m)}) == 1
                 for b in range(self.m))
        if p1 and p2:
            return "both"
        if p1:
            return "player-1"
        if p2:
            return "player-2"
        return "neither"

    def names(self, s: Iterable[int]) -> list:
        return [self.states[q] for q in sorted(s)]

    def lookup(self, names: Iterable[str]) -> frozenset:
        out = []
        for name in names:
            if name not in self.index:
                raise GameError(f"unknown state {name!r}")
            out.append(self.index[name])
        return frozenset(out)

    def with_target(self, t: Iterable[int]) -> "Game":
        return Game(self.states, self.actions, self.delta, frozenset(t),
                    self.coords, self.period, self.base_states)

    def format_dist(self, d: Distribution) -> str:
        return ",".join(f"{self.states[q]}:{format_rational(p)}" for q, p in d.items())


@dataclass(frozen=True)
class ValidationReport:
    classification: dict
    deterministic: bool
    n: int
    eta: Fraction

    def to_json(self) -> dict:
        return {"classification": self.classification,
                "deterministic": self.deterministic, "n": self.n,
                "eta": format_rational(self.eta)}


def validate_game(g: Game) -> ValidationReport:
    return ValidationReport({g.states[q]: g.classify(q) for q in range(g.n)},
                            g.deterministic, g.n, g.eta)


def make_game(states: Sequence[str], actions: Sequence[str],
              delta: Mapping[tuple, Mapping[str, object]],
              target: Iterable[str]) -> Game:
    """Build a game from name-keyed data; delta maps (q, a, b) to {q': p}."""
    states, actions = tuple(states), tuple(actions)
    if len(set(states)) != len(states) or not states:
        raise GameError("states must be a nonempty list of distinct names")
    if len(set(actions)) != len(actions) or not actions:
        raise GameError("actions must be a nonempty list of distinct names")
    idx = {s: i for i, s in enumerate(states)}
    rows = []
    for q in states:
        per_a = []
        for a in actions:
            per_b = []
            for b in actions:
                if (q, a, b) not in delta:
                    raise GameError(f"missing transition ({q}, {a}, {b})")
                to = delta[(q, a, b)]
                mass = []
                for name, p in to.items():
                    if name not in idx:
                        raise GameError(f"unknown state {name!r} in transition ({q}, {a}, {b})")
                    mass.append((idx[name], parse_rational(p)))
                try:
                    per_b.append(Distribution(mass))
                except GameError as exc:
                    raise GameError(f"transition ({q}, {a}, {b}): {exc}") from None
            per_a.append(tuple(per_b))
        rows.append(tuple(per_a))
    tset = []
    for name in target:
        if name not in idx:
            raise GameError(f"unknown state {name!r} in target")
        tset.append(idx[name])
    return Game(states, actions, tuple(rows), frozenset(tset))


def parse_game(text: str) -> Game:
    """Parse the JSON game format.

    Documents may give separate ``p1_actions``/``p2_actions`` lists instead
    of ``actions``; missing triples are then padded with the first action of
    the player whose alphabet is shorter.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise GameError("game document must be a JSON object")
    for key in ("states", "target", "transitions"):
        if key not in doc:
            raise GameError(f"missing field {key!r}")
    two = "p1_actions" in doc or "p2_actions" in doc
    if two:
        a1 = list(doc.get("p1_actions", []))
        a2 = list(doc.get("p2_actions", []))
        if not a1 or not a2:
            raise GameError("both p1_actions and p2_actions are required")
        actions = list(dict.fromkeys(a1 + a2))
    else:
        if "actions" not in doc:
            raise GameError("missing field 'actions'")
        actions = list(doc["actions"])
    delta: dict = {}
    for i, tr in enumerate(doc["transitions"]):
        try:
            key = (tr["from"], tr["p1"], tr["p2"])
            to = tr["to"]
        except (KeyError, TypeError):
            raise GameError(f"transition #{i}: needs from, p1, p2 and to") from None
        if key in delta:
            raise GameError(f"duplicate transition {key}")
        if key[1] not in actions or key[2] not in actions:
            raise GameError(f"transition #{i}: unknown action in {key}")
        if not isinstance(to, dict):
            raise GameError(f"transition #{i}: 'to' must be an object")
        delta[key] = to
    if two:
        delta = _pad_alphabets(doc["states"], actions, a1, a2, delta)
    return make_game(doc["states"], actions, delta, doc["target"])


def _pad_alphabets(states, actions, a1, a2, delta):
    full = {}
    for q in states:
        for a in actions:
            for b in actions:
                aa = a if a in a1 else a1[0]
                bb = b if b in a2 else a2[0]
                if (q, aa, bb) not in delta:
                    raise GameError(f"missing transition ({q}, {aa}, {bb})")
                full[(q, a, b)] = delta[(q, aa, bb)]
    return full


def game_to_json(g: Game) -> dict:
    trans = []
    for q in range(g.n):
        for a in range(g.m):
            for b in range(g.m):
                d = g.delta[q][a][b]
                trans.append({"from": g.states[q], "p1": g.actions[a], "p2": g.actions[b],
                              "to": {g.states[s]: format_rational(p) for s, p in d.items()}})
    return {"states": list(g.states), "actions": list(g.actions),
            "target": g.names(g.target), "transitions": trans}


def serialize_game(g: Game) -> str:
    return json.dumps(game_to_json(g), indent=1)


def parse_distribution(g: Game, text: str) -> Distribution:
    """Parse ``"q1:1/2,q2:1/2"``."""
    mass = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, p = part.rpartition(":")
        if not sep:
            raise GameError(f"bad distribution entry {part!r}")
        if name not in g.index:
            raise GameError(f"unknown state {name!r}")
        mass.append((g.index[name], parse_rational(p)))
    return Distribution(mass)


def attach_initial(g: Game, d: Distribution, name: str = "q_d") -> Game:
    """Add a fresh state whose every transition is ``d``; it is the last state."""
    if not d.support <= g.all_states:
        raise GameError("distribution support outside the state space")
    while name in g.index:
        name += "'"
    row = tuple(tuple(d for _ in g.actions) for _ in g.actions)
    return Game(g.states + (name,), g.actions, g.delta + (row,), g.target)


def load_instance(name: str) -> Game:
    return parse_game(resources.files("syncgames.instances").joinpath(f"{name}.json").read_text())


def load_expected(name: str) -> dict:
    path = resources.files("syncgames.instances").joinpath(f"{name}.expected.json")
    return json.loads(path.read_text())


def read_game(path: str) -> Game:
    """Read a game file; bare instance names such as ``gwin`` also resolve."""
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_game(fh.read())
    except FileNotFoundError:
        stem = path.rsplit("/", 1)[-1].removesuffix(".json")
        if stem in INSTANCES:
            return load_instance(stem)
        raise GameError(f"no such file: {path}") from None
