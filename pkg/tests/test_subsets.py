import pytest
from hypothesis import given, settings, strategies as st

from conftest import ids
from oracles import cycle_periods, subsets
from syncgames.core import CapExceeded
from syncgames.graphs import period, tarjan, is_cyclic, reachable
from syncgames.subsets import (find_accepting_scc, reachable_subsets, scc_periods,
                               selector_image, sure_weakly_supports)
from syncgames.testgen import random_game


def test_selector_images(games):
    g = games["gwin"]
    q1, q2, q3 = range(3)
    assert selector_image(g, {q1, q2}, (0, 1, 0)) == {q1, q2, q3}
    assert selector_image(g, {q2}, (0, 0, 0)) == {q2}


def test_reachable_from_q1(games):
    g = games["gwin"]
    graph = reachable_subsets(g, [ids(g, "q1")])
    assert set(graph.vertices) == {ids(g, "q1"), ids(g, "q1", "q2"), ids(g, "q1", "q2", "q3")}
    full = reachable_subsets(g, [g.all_states])
    assert g.all_states in full.vertices


def test_glose_from_q1(games):
    g = games["glose"]
    graph = reachable_subsets(g, [ids(g, "q1")])
    assert ids(g, "q1", "q2") in graph.vertices
    assert all(ids(g, "q1") <= v or v == ids(g, "q1") for v in graph.vertices)


def test_budget(games):
    g = games["g7"]
    with pytest.raises(CapExceeded):
        reachable_subsets(g, [g.all_states], budget=2)


def test_periods_gwin_and_gwinp(games):
    for name, p in (("gwin", 1), ("gwinp", 2)):
        g = games[name]
        graph = reachable_subsets(g, [ids(g, "q2")])
        comps = dict(scc_periods(graph))
        assert comps[frozenset({ids(g, "q2"), ids(g, "q3")})] == p


def test_self_loop_period():
    comp = ["a"]
    assert period(comp, lambda v: ["a"]) == 1
    assert is_cyclic(comp, lambda v: ["a"]) and not is_cyclic(comp, lambda v: [])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_periods_match_cycle_enumeration(seed, n):
    g = random_game(seed, n, deterministic=seed % 3 > 0)
    graph = reachable_subsets(g, subsets(n))
    if len(graph.vertices) > 12:
        return
    assert dict(scc_periods(graph)) == cycle_periods(graph.vertices, graph.succ)


def test_tarjan_order():
    succ = {1: [2], 2: [3], 3: [2], 4: [1]}.get
    comps = tarjan([4, 1, 2, 3], lambda v: succ(v) or [])
    assert [sorted(c) for c in comps] == [[2, 3], [1], [4]]
    assert reachable([1], lambda v: succ(v) or []) == {1, 2, 3}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 4))
def test_images_are_monotone(seed, n):
    g = random_game(seed, n)
    alpha = tuple((seed >> q) & 1 for q in range(n))
    for s in subsets(n):
        for s2 in subsets(n):
            if s <= s2:
                assert selector_image(g, s, alpha) <= selector_image(g, s2, alpha)


def test_central_property(games):
    """Every state of a selector-path endpoint ends some compatible play."""
    g = games["g10"]
    graph = reachable_subsets(g, [ids(g, "q")])
    for v in graph.vertices:
        for w, alpha in graph.edges[v].items():
            for p in w:
                assert any(p in g.supp[q][alpha[q]][b] for q in v for b in range(g.m))


def test_accepting_scc_examples(games):
    g = games["gwin"]
    found = find_accepting_scc(g, g.target)
    assert found.U == ids(g, "q3") and found.period == 1
    assert found.scc == frozenset({ids(g, "q2"), ids(g, "q3")})
    assert find_accepting_scc(games["glose"], games["glose"].target) is None
    h = games["g7"]
    found = find_accepting_scc(h, h.target)
    assert found.U == ids(h, "y") and found.period == 2


def test_sure_weakly_supports_gwin(games):
    g = games["gwin"]
    graph = reachable_subsets(g, subsets(3))
    good = sure_weakly_supports(g, g.target, graph)
    assert ids(g, "q2") in good and ids(g, "q1") not in good


def test_dot(games):
    g = games["gwin"]
    dot = reachable_subsets(g, [ids(g, "q1")]).to_dot()
    assert dot.startswith("digraph") and '"{q1}" -> "{q1,q2}"' in dot
