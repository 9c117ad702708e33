from fractions import Fraction
from pathlib import Path

import pytest

from netgood.errors import LimitExceeded
from netgood.game import GameSpec, make_profile
from netgood.graph import (TreeFamilyParams, complete_graph, empty_graph, from_preset,
                           gen_layered_tree, path_graph, star_graph)
from netgood.oracle import (ORACLE_N_LIMIT, all_trees, build_corpus, describe_record,
                            fm_feasible, load_manifest, numeric_br_check, oracle_enumerate,
                            oracle_pne_plus_exists, oracle_pne_plus_sets, write_manifest)
from netgood.prover import decide_pne_plus

F = Fraction
SPEC = GameSpec()
MANIFEST = Path(__file__).parent / "data" / "corpus.json"


def feasible_sets(g):
    return {r.active_set: r for r in oracle_enumerate(g, SPEC) if r.status != "infeasible"}


def test_fm_feasible_basics():
    rows = [({"x": F(1), "y": F(1)}, "=", F(1)), ({"x": F(1)}, ">", F(0)), ({"y": F(1)}, ">", F(0))]
    assert fm_feasible(rows, ["x", "y"])[:2] == (True, 1)
    rows.append(({"x": F(1)}, ">=", F(1)))
    assert fm_feasible(rows, ["x", "y"])[0] is False
    ok, free, sol = fm_feasible([({"x": F(2)}, "=", F(1)), ({"x": F(1)}, ">=", F(0))], ["x"])
    assert (ok, free, sol) == (True, 0, {"x": F(1, 2)})
    assert fm_feasible([({}, ">", F(0))], [])[0] is False


def test_oracle_enumerate_examples():
    p3 = feasible_sets(path_graph(3))
    assert set(p3) == {(1,), (0, 2)}
    assert p3[(1,)].profile == (0, 1, 0) and p3[(0, 2)].profile == (1, 0, 1)

    k2 = feasible_sets(complete_graph(2))
    assert set(k2) == {(0,), (1,), (0, 1)}
    assert k2[(0, 1)].status == "degenerate" and k2[(0, 1)].kernel_dim == 1

    e3 = feasible_sets(empty_graph(3))
    assert set(e3) == {(0, 1, 2)} and e3[(0, 1, 2)].profile == (1, 1, 1)
    assert describe_record(e3[(0, 1, 2)]) == "[0, 1, 2]: feasible (1/1, 1/1, 1/1)"
    assert len(oracle_enumerate(path_graph(3), SPEC)) == 8


def test_oracle_pne_plus_examples():
    assert oracle_pne_plus_exists(complete_graph(4), SPEC)
    assert oracle_pne_plus_exists(star_graph(4), SPEC)
    assert oracle_pne_plus_sets(star_graph(4), SPEC) == [(1, 2, 3, 4)]
    assert oracle_pne_plus_sets(path_graph(3), SPEC) == [(0, 2)]
    assert oracle_pne_plus_sets(path_graph(4), SPEC) == [(0, 3), (0, 1, 3), (0, 2, 3)]


def test_small_layered_tree_matches_prover():
    g = from_preset("tree:1,3,4")
    assert g.n <= ORACLE_N_LIMIT
    expected = oracle_pne_plus_exists(g, SPEC)
    assert expected is True
    assert (decide_pne_plus(g, SPEC).verdict == "witness") == expected


def test_oracle_size_limit():
    with pytest.raises(LimitExceeded):
        oracle_enumerate(path_graph(ORACLE_N_LIMIT + 1), SPEC)
    with pytest.warns(UserWarning):
        mini = gen_layered_tree(TreeFamilyParams((1, 3, 4)))
    with pytest.raises(LimitExceeded):
        oracle_pne_plus_exists(gen_layered_tree(TreeFamilyParams((1, 3, 4, 5))), SPEC)
    assert mini.n == 10


def test_numeric_br_check_examples():
    p3 = path_graph(3)
    assert numeric_br_check(p3, SPEC, make_profile([0, 1, 0]))
    assert not numeric_br_check(p3, SPEC, make_profile(["1/2", "1/2", 0]))
    assert not numeric_br_check(complete_graph(2), SPEC, make_profile([0, 0]))
    for benefit in ("sqrt", "log"):
        assert numeric_br_check(p3, GameSpec(benefit=benefit), make_profile([1, 0, 1]))


def test_tree_census():
    # unlabeled trees on 1..7 vertices: 1, 1, 1, 2, 3, 6, 11
    trees = all_trees(7)
    assert len(trees) == 25
    assert all(t.is_tree() for t in trees)


def test_corpus_is_frozen(tmp_path):
    corpus = build_corpus()
    assert len(corpus) == 225
    assert all(g.is_connected() and g.n <= 7 for _, g in corpus)
    assert load_manifest(MANIFEST) == corpus
    out = tmp_path / "corpus.json"
    write_manifest(out, corpus)
    assert out.read_text() == MANIFEST.read_text()
