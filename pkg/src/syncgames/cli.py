"""Command-line front end."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import (CapExceeded, GameError, InvariantViolation, parse_distribution,
                   read_game, serialize_game)
from .simulate import Uniform, check_sync, outcome_sequence
from .solver import MAX_PERIOD, MODES, membership, solve
from .statebased import OBJECTIVES, ORACLE_CAP, brute_force_statebased
from .strategies import strategy_from_json
from .subsets import VERTEX_BUDGET, reachable_subsets, scc_periods
from .testgen import mdp_to_weakly_game, random_game

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_BUG = 0, 1, 2, 3
WINS = ("sure", "almost-sure")


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=1))
    else:
        print(text)


def _target(g, args):
    if getattr(args, "target", None):
        return g.lookup(s.strip() for s in args.target.split(",") if s.strip())
    return g.target


def cmd_solve(args) -> int:
    g = read_game(args.game)
    kw = {"max_period": args.max_period} if args.win == "almost-sure" else {}
    res = solve(g, _target(g, args), args.mode, args.win, **kw)
    out = res.to_json(g)
    if not args.certificate:
        out.pop("certificate", None)
    _emit(args, out, "winning: " + " ".join(out["winning"]))
    return EXIT_OK


def cmd_membership(args) -> int:
    g = read_game(args.game)
    d = parse_distribution(g, args.dist)
    kw = {"max_period": args.max_period} if args.win == "almost-sure" else {}
    res = membership(g, _target(g, args), args.mode, args.win, d, **kw)
    wit = {k: (g.names(v) if isinstance(v, frozenset) else v) for k, v in res.witness.items()}
    _emit(args, {"member": res.member, "witness": wit}, str(res.member).lower())
    return EXIT_OK


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise GameError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}") from e


def cmd_simulate(args) -> int:
    g = read_game(args.game)
    t = _target(g, args)
    sigma = strategy_from_json(g, _load_json(args.p1), 1)
    tau = Uniform() if args.p2 == "uniform" else strategy_from_json(g, _load_json(args.p2), 2)
    seq = outcome_sequence(g, sigma, tau, parse_distribution(g, args.dist), args.horizon)
    if args.csv:
        sys.stdout.write(seq.to_csv(g, t))
        return EXIT_OK
    masses = [str(m) for m in seq.mass(t)]
    report = check_sync(seq, t, args.mode, args.eps)
    _emit(args, {"target_mass": masses, "sync": report.to_json()},
          "\n".join(f"{i} {m}" for i, m in enumerate(masses)))
    return EXIT_OK


def cmd_subset(args) -> int:
    g = read_game(args.game)
    if args.seed:
        seeds = [g.lookup(s.strip() for s in args.seed.split(","))]
    else:
        seeds = [frozenset([q]) for q in range(g.n)]
    graph = reachable_subsets(g, seeds, args.budget)
    if args.dot:
        print(graph.to_dot())
        return EXIT_OK
    sccs = [{"scc": [g.names(v) for v in sorted(c, key=sorted)], "period": p}
            for c, p in scc_periods(graph)]
    out = {"vertices": [g.names(v) for v in graph.vertices], "cyclic_sccs": sccs}
    _emit(args, out, "\n".join("{" + ",".join(v) + "}" for v in out["vertices"]))
    return EXIT_OK


def cmd_oracle(args) -> int:
    g = read_game(args.game)
    t = g.lookup(s.strip() for s in args.states.split(",") if s.strip())
    win = brute_force_statebased(g, t, args.objective, args.cap)
    _emit(args, {"objective": args.objective, "winning": g.names(win)}, " ".join(g.names(win)))
    return EXIT_OK


def cmd_gen(args) -> int:
    g = random_game(args.seed, args.states, args.actions, args.branching, args.granularity,
                    deterministic=args.deterministic, mdp=args.mdp)
    Path(args.out).write_text(serialize_game(g))
    return EXIT_OK


def cmd_reduce(args) -> int:
    g = read_game(args.game)
    (q0,) = g.lookup([args.init])
    h, _ = mdp_to_weakly_game(g, _target(g, args), q0)
    Path(args.out).write_text(serialize_game(h))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="syncgames", description="Synchronizing objectives in stochastic games.")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, target=True):
        sp.add_argument("--game", required=True, help="game file or bundled instance name")
        if target:
            sp.add_argument("--target", help="comma-separated target states (default: the game's)")

    sp = sub.add_parser("solve", parents=[shared])
    common(sp)
    sp.add_argument("--mode", choices=MODES, required=True)
    sp.add_argument("--win", choices=WINS, required=True)
    sp.add_argument("--certificate", action="store_true")
    sp.add_argument("--max-period", type=int, default=MAX_PERIOD)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("membership", parents=[shared])
    common(sp)
    sp.add_argument("--mode", choices=MODES, required=True)
    sp.add_argument("--win", choices=WINS, required=True)
    sp.add_argument("--dist", required=True, help='e.g. "q1:1/2,q2:1/2"')
    sp.add_argument("--max-period", type=int, default=MAX_PERIOD)
    sp.set_defaults(func=cmd_membership)

    sp = sub.add_parser("simulate", parents=[shared])
    common(sp)
    sp.add_argument("--p1", required=True, help="player-1 strategy JSON file")
    sp.add_argument("--p2", default="uniform", help="'uniform' or a player-2 strategy JSON file")
    sp.add_argument("--dist", required=True)
    sp.add_argument("--horizon", type=int, required=True)
    sp.add_argument("--mode", choices=MODES, default="weakly")
    sp.add_argument("--eps", default="0")
    sp.add_argument("--csv", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("subset", parents=[shared])
    common(sp, target=False)
    sp.add_argument("--seed", help="comma-separated seed states (default: all singletons)")
    sp.add_argument("--budget", type=int, default=VERTEX_BUDGET)
    sp.add_argument("--dot", action="store_true")
    sp.set_defaults(func=cmd_subset)

    sp = sub.add_parser("oracle", parents=[shared])
    common(sp, target=False)
    sp.add_argument("--objective", choices=OBJECTIVES, required=True)
    sp.add_argument("--states", required=True, help="comma-separated target states")
    sp.add_argument("--cap", type=int, default=ORACLE_CAP)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("gen", parents=[shared])
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--states", type=int, required=True)
    sp.add_argument("--actions", type=int, default=2)
    sp.add_argument("--branching", type=int, default=2)
    sp.add_argument("--granularity", type=int, default=2)
    kind = sp.add_mutually_exclusive_group()
    kind.add_argument("--deterministic", action="store_true")
    kind.add_argument("--mdp", action="store_true")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("reduce", parents=[shared])
    common(sp)
    sp.add_argument("--init", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_reduce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as e:
        code, kind, err = EXIT_CAP, "resource-cap", e
    except InvariantViolation as e:
        code, kind, err = EXIT_BUG, "invariant-violation", e
    except (GameError, OSError, ValueError) as e:
        code, kind, err = EXIT_INPUT, "input-error", e
    if args.json:
        print(json.dumps({"error": kind, "message": str(err)}, sort_keys=True))
    else:
        print(f"error: {err}", file=sys.stderr)
    return code

if __name__ == "__main__":
    sys.exit(main())
