import random
import warnings

import pytest
from hypothesis import given, strategies as st

from netgood.errors import GraphError
from netgood.graph import (Topology, TreeFamilyParams, bfs_levels, canonical_tree,
                           complete_graph, degree, dump_edge_list, extend_leaves, from_json_obj,
                           from_preset, gen_layered_tree, load_edge_list, loads_topology,
                           path_graph, star_graph, to_dot, to_json_obj)


@st.composite
def topologies(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Topology.from_edges(n, edges)


@st.composite
def tree_params(draw):
    degs = [draw(st.integers(1, 3))]
    for _ in range(draw(st.integers(0, 3))):
        degs.append(degs[-1] + draw(st.integers(1, 2)))
    return TreeFamilyParams(tuple(degs))


def quiet_gen(p):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return gen_layered_tree(p)


# -- degree ------------------------------------------------------------------

def test_degree_examples():
    assert degree(path_graph(3), 1) == 2
    k4 = complete_graph(4)
    assert all(degree(k4, i) == 3 for i in range(4))
    assert degree(canonical_tree(), 0) == 1


def test_degree_out_of_range():
    with pytest.raises(GraphError):
        degree(path_graph(3), 3)
    with pytest.raises(GraphError):
        path_graph(3).neighbors(-1)


@given(topologies())
def test_adjacency_symmetric_and_degree_consistent(t):
    for i in range(t.n):
        assert t.degree(i) == len(t.neighbors(i))
        for j in t.neighbors(i):
            assert i in t.neighbors(j)
            assert i != j


def test_topology_rejects_bad_edges():
    with pytest.raises(GraphError, match="self-loop"):
        Topology.from_edges(2, [(0, 0)])
    with pytest.raises(GraphError, match="duplicate"):
        Topology.from_edges(2, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        Topology.from_edges(2, [(0, 2)])


# -- tree family -------------------------------------------------------------

def test_smallest_tree():
    t = quiet_gen(TreeFamilyParams((1, 3)))
    assert t.n == 4
    assert t.edges == ((0, 1), (1, 2), (1, 3))


def test_canonical_tree_counts():
    t = canonical_tree()
    assert (t.n, len(t.edges)) == (154, 153)
    # recount from the emitted edges rather than the generator's arithmetic
    counts = [0] * t.n
    for u, v in t.edges:
        counts[u] += 1
        counts[v] += 1
    levels = bfs_levels(t)
    assert [len(level) for level in levels] == [1, 1, 2, 6, 24, 120]
    assert [sorted({counts[v] for v in level}) for level in levels] == [[1], [3], [4], [5], [6], [1]]


def test_tree_params_validation():
    with pytest.raises(GraphError, match="strictly increasing"):
        TreeFamilyParams((1, 3, 3))
    with pytest.raises(GraphError):
        TreeFamilyParams((1, 3), depth=5)
    with pytest.raises(GraphError):
        TreeFamilyParams((0, 3))
    with pytest.raises(GraphError):
        TreeFamilyParams(())
    assert TreeFamilyParams((1, 3, 4, 5)).in_counterexample_class
    assert not TreeFamilyParams((1, 3, 4)).in_counterexample_class


def test_shallow_tree_warns():
    with pytest.warns(UserWarning):
        gen_layered_tree(TreeFamilyParams((1, 3)))


@given(tree_params())
def test_generated_trees_are_layered(p):
    t = quiet_gen(p)
    assert t.is_tree() and t.is_connected()
    assert t.n == sum(p.level_sizes())
    levels = bfs_levels(t)
    assert len(levels) == p.depth
    for k, level in enumerate(levels[:-1]):
        assert {t.degree(v) for v in level} == {p.level_degrees[k]}
    assert {t.degree(v) for v in levels[-1]} == {1}


def test_extend_leaves_keeps_original():
    g = quiet_gen(TreeFamilyParams((1, 3, 4)))
    h = extend_leaves(g, random.Random(3))
    assert h.n > g.n and h.is_tree()
    assert set(g.edges) <= set(h.edges)
    # only leaves of g gained neighbors
    for i in range(g.n):
        if h.degree(i) != g.degree(i):
            assert g.degree(i) == 1 and i != 0


# -- presets and I/O ---------------------------------------------------------

def test_presets():
    assert from_preset("path:3").edges == ((0, 1), (1, 2))
    assert from_preset("star:4").degree(0) == 4
    assert from_preset("complete:5").edges == complete_graph(5).edges
    assert from_preset("empty:3").edges == ()
    assert from_preset("goyal-canonical").n == 154
    assert from_preset("canonical") == from_preset("goyal-canonical")
    assert from_preset("tree:1,3,4").n == 10
    for bad in ("nope", "star:x", "hex:3", "tree:3,1"):
        with pytest.raises(GraphError):
            from_preset(bad)


def test_edge_list_examples():
    t = load_edge_list("0 1\n1 2")
    assert t == path_graph(3)
    assert dump_edge_list(t) == "0 1\n1 2"
    assert dump_edge_list(load_edge_list("2 1\n# comment\n\n1 0  # trailing\n")) == "0 1\n1 2"
    with pytest.raises(GraphError, match="self-loop"):
        load_edge_list("0 0")
    with pytest.raises(GraphError):
        load_edge_list("0 1\n0 1")
    with pytest.raises(GraphError):
        load_edge_list("0 one")
    with pytest.raises(GraphError):
        load_edge_list("")


def test_isolated_players_survive_round_trip():
    t = Topology.from_edges(4, [(0, 1)])
    assert load_edge_list(dump_edge_list(t)) == t


@given(topologies())
def test_edge_list_round_trip(t):
    assert load_edge_list(dump_edge_list(t)) == t
    assert from_json_obj(to_json_obj(t)) == t
    assert loads_topology(dump_edge_list(t)) == t


def test_dot_lists_every_edge():
    dot = to_dot(star_graph(3))
    assert dot.startswith("graph g {")
    for leaf in (1, 2, 3):
        assert f"0 -- {leaf};" in dot
    assert 'deg=3' in dot


def test_fingerprint_depends_only_on_structure():
    assert path_graph(4).fingerprint() == load_edge_list("2 3\n0 1\n1 2").fingerprint()
    assert path_graph(4).fingerprint() != star_graph(3).fingerprint()
