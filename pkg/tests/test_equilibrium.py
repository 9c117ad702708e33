import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from netgood.equilibrium import (active_set_verdicts, best_response, br_dynamics, describe,
                                 enumerate_pne, is_pne, solve_active_set)
from netgood.errors import InvalidProfile, LimitExceeded
from netgood.game import GameSpec, make_profile
from netgood.graph import Topology, complete_graph, empty_graph, path_graph, star_graph

F = Fraction
P3 = path_graph(3)
SPEC = GameSpec()


@st.composite
def small_graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Topology.from_edges(n, edges)


def prof(*values):
    return make_profile(str(v) for v in values)


# -- exact checks ------------------------------------------------------------

def test_is_pne_examples():
    assert is_pne(P3, SPEC, prof(0, 1, 0))
    assert is_pne(P3, SPEC, prof(1, 0, 1))
    check = is_pne(P3, SPEC, prof("1/2", "1/2", 0))
    assert not check
    assert [v.player for v in check.violations] == [2]
    assert check.violations[0].required == F(1, 2)
    with pytest.raises(InvalidProfile):
        is_pne(P3, SPEC, prof(0, 1))


def test_tie_at_threshold_is_inactive():
    # player 1 sees exactly delta, so zero effort is its best response
    assert is_pne(path_graph(2), SPEC, prof(1, 0))
    assert best_response(path_graph(2), SPEC, prof(1, 0), 1) == 0


def test_best_response_examples():
    star = star_graph(3)
    assert best_response(star, SPEC, prof(0, 0, 0, 0), 0) == 1
    assert best_response(star, SPEC, prof(0, "1/2", 1, 0), 0) == 0
    assert best_response(star, SPEC, prof(0, "1/4", 0, 0), 0) == F(3, 4)


# -- dynamics ----------------------------------------------------------------

def test_dynamics_examples():
    res = br_dynamics(P3, SPEC, prof(0, 0, 0), order=[0, 1, 2])
    assert res.converged and res.profile == prof(1, 0, 1)
    k2 = complete_graph(2)
    res = br_dynamics(k2, SPEC, prof(0, 0), schedule="synchronous", max_iters=10)
    assert not res.converged
    assert res.profile in (prof(0, 0), prof(1, 1))
    assert res.trace == [F(1)] * 10
    fixed = br_dynamics(P3, SPEC, prof(0, 1, 0))
    assert fixed.converged and fixed.profile == prof(0, 1, 0) and fixed.trace == [0]
    with pytest.raises(ValueError):
        br_dynamics(P3, SPEC, prof(0, 0, 0), schedule="random")


@given(small_graphs(), st.integers(0, 10**6))
def test_dynamics_fixed_points_are_equilibria(g, seed):
    rng = random.Random(seed)
    s0 = tuple(F(rng.randint(0, 8), 4) for _ in range(g.n))
    res = br_dynamics(g, SPEC, s0, schedule=rng.choice(["round-robin", "synchronous"]))
    if res.converged:
        assert is_pne(g, SPEC, res.profile)


# -- active sets -------------------------------------------------------------

def test_solve_active_set_examples():
    assert solve_active_set(P3, SPEC, {1}).profile == prof(0, 1, 0)
    assert solve_active_set(P3, SPEC, {0, 1}) is None
    fam = solve_active_set(complete_graph(2), SPEC, {0, 1})
    assert fam.degenerate and fam.kernel_dim == 1
    s0, s1 = fam.profile
    assert s0 + s1 == 1 and s0 > 0 and s1 > 0
    assert is_pne(complete_graph(2), SPEC, fam.profile)
    with pytest.raises(ValueError):
        solve_active_set(P3, SPEC, {5})


def test_enumerate_examples():
    sols = enumerate_pne(P3, SPEC)
    assert sorted(s.profile for s in sols) == [prof(0, 1, 0), prof(1, 0, 1)]
    assert not any(s.degenerate for s in sols)

    star = star_graph(4)
    profiles = {s.profile for s in enumerate_pne(star, SPEC)}
    assert prof(1, 0, 0, 0, 0) in profiles
    assert prof(0, 1, 1, 1, 1) in profiles

    k3 = enumerate_pne(complete_graph(3), SPEC)
    assert sum(not s.degenerate for s in k3) == 3
    families = [s for s in k3 if s.degenerate]
    assert len(families) == 1
    assert families[0].active_set == (0, 1, 2) and families[0].kernel_dim == 2
    assert families[0].profile == (F(1, 3),) * 3
    # without folding the two-player faces of that family are listed too
    assert sum(s.degenerate for s in enumerate_pne(complete_graph(3), SPEC, fold=False)) == 4

    assert [s.profile for s in enumerate_pne(empty_graph(3), SPEC)] == [prof(1, 1, 1)]
    assert "degenerate" in describe(families[0])


def test_enumeration_limit():
    with pytest.raises(LimitExceeded):
        enumerate_pne(path_graph(21), SPEC)
    with pytest.raises(LimitExceeded):
        enumerate_pne(path_graph(6), SPEC, n_limit=5)


def test_parallel_enumeration_matches_serial():
    g = Topology.from_edges(9, [(i, (i + 1) % 9) for i in range(9)] + [(0, 4)])
    assert active_set_verdicts(g, SPEC, workers=2) == active_set_verdicts(g, SPEC, workers=1)


def test_threads_env_var(monkeypatch):
    monkeypatch.setenv("NETGOOD_THREADS", "2")
    g = path_graph(9)
    assert enumerate_pne(g, SPEC) == enumerate_pne(g, SPEC, workers=1)


def maximal_independent_sets(g):
    nxg = nx.Graph()
    nxg.add_nodes_from(range(g.n))
    nxg.add_edges_from(g.edges)
    return [set(c) for c in nx.find_cliques(nx.complement(nxg))]


@given(small_graphs())
def test_mis_profiles_are_equilibria(g):
    for m in maximal_independent_sets(g):
        s = tuple(SPEC.delta if i in m else F(0) for i in range(g.n))
        assert is_pne(g, SPEC, s)
        assert s in {sol.profile for sol in enumerate_pne(g, SPEC)}


@given(small_graphs(max_n=6))
def test_enumeration_is_sound_and_complete_on_supports(g):
    sols = enumerate_pne(g, SPEC, fold=False)
    for sol in sols:
        assert is_pne(g, SPEC, sol.profile)
        assert tuple(i for i, v in enumerate(sol.profile) if v > 0) == sol.active_set
    # any equilibrium with small-denominator efforts shows up under its support
    supports = {sol.active_set for sol in sols}
    isolated = {sol.profile for sol in sols if not sol.degenerate}
    for s in itertools.product([F(0), F(1, 2), F(1)], repeat=g.n):
        if is_pne(g, SPEC, s):
            support = tuple(i for i, v in enumerate(s) if v > 0)
            assert support in supports
            if support not in {x.active_set for x in sols if x.degenerate}:
                assert s in isolated
