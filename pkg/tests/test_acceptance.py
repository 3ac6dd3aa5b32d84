"""Acceptance criteria 1-14, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also repeated in the terminal summary.
"""
import time
from fractions import Fraction
from itertools import combinations

import pytest

from conftest import ids
from oracles import cpre_def, iterate_cpre_chain, pospre_def, subsets, suite
from syncgames.core import Distribution, attach_initial
from syncgames.operators import cpre, pospre
from syncgames.simulate import Uniform, outcome_sequence
from syncgames.solver import (ElseRecord, ThenRecord, membership, self_recurrent_exists,
                              solve, solve_as, solve_as_weakly, solve_as_weakly_det, solve_sure)
from syncgames.statebased import (OBJECTIVES, almost_sure_cobuchi, almost_sure_reach,
                                  brute_force_statebased, sure_cobuchi, sure_safety)
from syncgames.strategies import (all_pass, as_weakly_strategy, certificate_adversary,
                                  random_adversary, spoil_bounds, substitution_game)
from syncgames.subsets import reachable_subsets, sure_weakly_supports
from syncgames.testgen import mdp_to_weakly_game, random_game

LINES = []
MODES = ("always", "strongly", "weakly", "eventually")


def report(n, ok, detail=""):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
    LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_01_gwin(games):
    g = games["gwin"]
    got = (solve_as(g, g.target, "weakly").winning_diracs,
           solve_sure(g, g.target, "weakly").winning_diracs,
           solve_sure(g, g.target, "eventually").winning_diracs,
           solve_sure(g, g.target, "always").winning_diracs)
    want = (ids(g, "q1", "q2", "q3"), ids(g, "q2", "q3"), ids(g, "q1", "q2", "q3"), frozenset())
    report(1, got == want, f"as-weakly/sure-weakly/sure-eventually/sure-always = {[g.names(s) for s in got]}")


def test_criterion_02_gwinp(games):
    g = games["gwinp"]
    res = solve_as_weakly(g, g.target)
    ok = res.winning_diracs == ids(g, "q2", "q3") and res.certificate.final_period == 2
    report(2, ok, f"as-weakly = {g.names(res.winning_diracs)}, period {res.certificate.final_period}")


def test_criterion_03_glose(games):
    g = games["glose"]
    w = solve_as(g, g.target, "weakly").winning_diracs
    e = solve_as(g, g.target, "eventually").winning_diracs
    chain = iterate_cpre_chain(g, g.target, g.n + 1)
    ok = w == frozenset() and e == g.all_states == frozenset().union(*chain)
    report(3, ok, f"as-weakly = {g.names(w)}, as-eventually = {g.names(e)}")


def test_criterion_04_g7(games):
    g = games["g7"]
    region = solve_as(g, g.target, "weakly")
    xy = ids(g, "x", "y")
    bad = [g.names(s) for s in subsets(g.n) if region.contains_support(s) != (not xy <= s)]
    spot = membership(g, g.target, "weakly", "almost-sure", Distribution.uniform(xy)).member
    ok = region.winning_diracs == g.all_states and not bad and not spot
    report(4, ok, f"all Diracs winning: {region.winning_diracs == g.all_states}; "
                  f"{len(bad)} of {len(subsets(g.n))} supports disagree with the x/y rule")


def test_criterion_05_g10(games):
    g = games["g10"]
    w = solve_as(g, g.target, "weakly").winning_diracs
    report(5, w == g.all_states, f"as-weakly = {g.names(w)}")


def test_criterion_06_g13(games):
    g = games["g13"]
    res = solve_as_weakly(g, g.target)
    its = res.certificate.iterations
    then = any(isinstance(r, ThenRecord) and r.U == ids(g, "y")
               and {q for q, _ in r.W} == ids(g, "x", "y") for r in its)
    els = any(isinstance(r, ElseRecord) and {q for q, _ in r.L} == ids(g, "q", "s") for r in its)
    ok = res.winning_diracs == ids(g, "x", "y") and then and els
    report(6, ok, f"as-weakly = {g.names(res.winning_diracs)}, THEN U={{y}} W={{x,y}}: {then}, ELSE L={{q,s}}: {els}")


def _supports(region, n):
    return {s for s in subsets(n) if region.contains_support(s)}


def _laws(g):
    t = g.target
    out = []
    sure = {m: _supports(solve_sure(g, t, m), g.n) for m in MODES}
    almost = {m: _supports(solve_as(g, t, m), g.n) for m in MODES}
    for win, reg in (("sure", sure), ("almost-sure", almost)):
        for lo, hi in zip(MODES, MODES[1:]):
            if not reg[lo] <= reg[hi]:
                out.append(f"{win} {lo} not within {hi}")
    for m in MODES:
        if not sure[m] <= almost[m]:
            out.append(f"sure {m} not within almost-sure")
    # always: both win-modes equal the greatest CPre-closed subset of t
    y = frozenset(t)
    while cpre_def(g, y) & y != y:
        y = cpre_def(g, y) & y
    if sure["always"] != almost["always"] or almost["always"] != {s for s in subsets(g.n) if s <= y}:
        out.append("always-mode equality")
    # eventually: CPre-chain sets together with the as-weakly supports
    chain = iterate_cpre_chain(g, t, 2 ** g.n)
    ev = {s for s in subsets(g.n) if any(s <= c for c in chain)} | almost["weakly"]
    if almost["eventually"] != ev:
        out.append("eventually-mode equality")
    for s in subsets(g.n, empty=True):
        if cpre(g, s) != g.all_states - pospre(g, 2, g.all_states - s):
            out.append(f"duality at {sorted(s)}")
        if pospre(g, 2, s) != pospre_def(g, 2, s):
            out.append("PosPre2 definition")
    graph = reachable_subsets(g, subsets(g.n))
    sw = sure_weakly_supports(g, t, graph)
    for s in sw:
        for k in range(1, len(s)):
            if any(frozenset(c) not in sw for c in combinations(sorted(s), k)):
                out.append("sure-weakly downward closure")
    if g.n <= 3:
        for s in subsets(g.n):
            h = attach_initial(g, Distribution.uniform(s))
            if (g.n in solve_as_weakly(h, t).winning_diracs) != (s in almost["weakly"]):
                out.append(f"as-weakly support {sorted(s)} vs attached initial state")
    return out


def test_criterion_07_identity_laws():
    start = time.perf_counter()
    bad = []
    for seed, g in suite(500, 5, offset=7000):
        bad += [(seed, v) for v in _laws(g)]
    report(7, not bad, f"500 games, {len(bad)} violations {bad[:3]} ({time.perf_counter() - start:.1f}s)")


FIXPOINT = {"as-reach": lambda g, t: almost_sure_reach(g, t).region, "sure-safety": sure_safety,
            "as-cobuchi": almost_sure_cobuchi, "sure-cobuchi": sure_cobuchi}


def test_criterion_08_oracle_equivalence():
    start = time.perf_counter()
    bad = []
    for seed, g in suite(200, 4, offset=1000):
        for obj in OBJECTIVES:
            if FIXPOINT[obj](g, g.target) != brute_force_statebased(g, g.target, obj):
                bad.append((seed, obj))
    report(8, not bad, f"200 games x {len(OBJECTIVES)} objectives, {len(bad)} mismatches "
                       f"({time.perf_counter() - start:.1f}s)")


def test_criterion_09_deterministic_cross_check():
    bad = [seed for seed, g in suite(200, 5, offset=2000, deterministic=True)
           if solve_as_weakly_det(g, g.target) != solve_as_weakly(g, g.target).winning_diracs]
    report(9, not bad, f"200 deterministic games, {len(bad)} mismatches")


def test_criterion_10_self_recurrent_witness():
    bad = [seed for seed, g in suite(200, 5, offset=2000, deterministic=True)
           if bool(solve_as_weakly(g, g.target).winning_diracs) != self_recurrent_exists(g, g.target)]
    report(10, not bad, f"200 games, {len(bad)} mismatches")


def test_criterion_11_mdp_reduction():
    bad, pos = [], 0
    for seed in range(200):
        m = random_game(3000 + seed, 1 + seed % 4, mdp=True)
        h, t = mdp_to_weakly_game(m, m.target, 0)
        sure = membership(m, m.target, "eventually", "sure", Distribution.dirac(0)).member
        pos += sure
        if sure != (0 in solve_as_weakly(h, t).winning_diracs):
            bad.append(seed)
    report(11, not bad, f"200 MDPs ({pos} positive), {len(bad)} mismatches")


def test_criterion_12_strategy_simulation(games):
    g = games["gwin"]
    strat = as_weakly_strategy(solve_as_weakly(g, g.target).certificate, g)
    c0 = strat.start_counter([g.index["q1"]])
    seq = outcome_sequence(g, strat.for_start(c0), Uniform(), Distribution.dirac(g.index["q1"]), 200)
    ends = [0] + [e for e in strat._block_ends(c0, 200) if e <= 200]
    windows = [max(seq[i].mass_of(g.target) for i in range(a + 1, b + 1)) for a, b in zip(ends, ends[1:])]
    # hand derivation: at block end e, 2^-e is still in q1 and the rest sits in q3
    pinned = [1 - Fraction(1, 2 ** e) for e in ends[1:]]
    ok_win = windows == pinned and max(windows) >= 1 - Fraction(1, 1000)

    p = games["gwinp"]
    cert = solve_as_weakly(p, p.target).certificate
    sp = as_weakly_strategy(cert, p)
    seq = outcome_sequence(p, sp.for_start(0), certificate_adversary(cert, p), Distribution.dirac(0), 200)
    # every action behaves the same in GWINP, so d_i(q1) = 2^-i and q3 collects the odd-parity leaks
    oracle = [Fraction(1, 2 ** i) + sum(Fraction(1, 2 ** j) for j in range(1, i + 1) if (i - j) % 2)
              for i in range(201)]
    masses = [d.mass_of(p.target) for d in seq.steps]
    c = 1 - max(oracle[2:])
    ok_lose = masses == oracle and c == Fraction(1, 4) and all(x <= 1 - c for x in masses[2:])
    report(12, ok_win and ok_lose, f"GWIN window maxima {[float(w) for w in windows]}; "
                                   f"GWINP rounds 2..200 stay <= 1 - {c}")


def _invariant_holds(trace, N):
    for _, _, f in trace:
        vals = sorted(f.values())
        k = len(vals)
        if any(v > N + 1 - k + i for i, v in enumerate(vals)):
            return False
    return True


def test_criterion_13_substitution_game():
    bad = []
    for N in (1, 2, 3, 5):
        advs = [("all-pass", all_pass)] + [(f"random-{s}", random_adversary(s)) for s in range(100)]
        for name, adv in advs:
            rep = substitution_game(N, N + 1, adv, 10 ** 4, record=name in ("all-pass", "random-0"))
            if not (rep.sustained and rep.invariant_ok and _invariant_holds(rep.trace, N)):
                bad.append((N, name))
        if substitution_game(N, N, all_pass, 10 ** 4).sustained:
            bad.append((N, "K=N sustained"))
    report(13, not bad, f"N in {{1,2,3,5}}, {len(bad)} failures")


def _pair(b):
    return b.epsilonW, b.NW


def test_criterion_14_spoil_bounds():
    ok = _pair(spoil_bounds(1, 1)) == (Fraction(1, 32), 4)
    for n in (1, 2, 3):
        for eta in (Fraction(1), Fraction(1, 2), Fraction(1, 3)):
            two_n = 1 << n
            nw = two_n * two_n
            base = Fraction(1)
            for _ in range((n + 1) * two_n):
                base *= eta
            base /= n * nw
            eps = Fraction(1, 2 * n)
            for _ in range(two_n):
                eps *= base
            ok = ok and _pair(spoil_bounds(n, eta)) == (eps, nw)
    report(14, ok, f"spoil_bounds(1, 1) = {_pair(spoil_bounds(1, 1))}")
