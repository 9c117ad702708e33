import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from netgood.equilibrium import enumerate_pne
from netgood.errors import InvalidGameSpec, InvalidProfile, NotAnEquilibrium
from netgood.game import (BENEFITS, GameSpec, exposure, format_rational, make_profile,
                          ordinal_compare, parse_rational, payoff, payoff_report)
from netgood.graph import Topology, path_graph

F = Fraction
P3 = path_graph(3)


def test_rationals():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational(2) == 2
    assert parse_rational("0.25") == F(1, 4)
    assert format_rational(F(3, 4)) == "3/4"
    assert format_rational(F(2)) == "2/1"
    with pytest.raises(TypeError):
        parse_rational(0.5)
    with pytest.raises(ValueError):
        parse_rational("x")


def test_game_spec_defaults_and_validation():
    spec = GameSpec()
    assert (spec.delta, spec.cost, spec.s_max) == (1, 1, 2)
    assert GameSpec(delta="1/2").s_max == 1
    for bad in (dict(delta=0), dict(cost=-1), dict(delta=2, s_max=1), dict(benefit="cubic")):
        with pytest.raises(InvalidGameSpec):
            GameSpec(**bad)
    with pytest.raises(InvalidGameSpec):
        GameSpec.from_json_obj({"delta": "x"})


def test_game_spec_json_round_trip():
    spec = GameSpec(delta="3/2", cost=2, benefit="log")
    assert GameSpec.from_json_obj(spec.to_json_obj()) == spec
    assert spec.to_json_obj() == {"delta": "3/2", "cost": "2/1", "s_max": "3/1", "benefit": "log"}


@pytest.mark.parametrize("name", sorted(BENEFITS))
@pytest.mark.parametrize("delta,cost", [(1, 1), (2, 3), (0.5, 0.25)])
def test_benefit_shape(name, delta, cost):
    f = BENEFITS[name](delta, cost)
    xs = np.linspace(0, 4 * delta, 401)
    ys = f(xs)
    assert ys[0] == 0
    assert np.all(np.diff(ys) > 0)
    assert np.all(np.diff(ys, 2) < 0)
    h = 1e-6
    assert math.isclose((f(delta + h) - f(delta - h)) / (2 * h), cost, rel_tol=1e-6)


def test_profiles():
    spec = GameSpec()
    assert make_profile(["1/2", 0, "1"], P3, spec) == (F(1, 2), 0, 1)
    with pytest.raises(InvalidProfile):
        make_profile([0, 1], P3, spec)
    with pytest.raises(InvalidProfile):
        make_profile([0, 3, 0], P3, spec)
    with pytest.raises(InvalidProfile):
        make_profile([0, "-1", 0], P3, spec)


def test_payoff_examples():
    spec = GameSpec()
    f = spec.f
    s = make_profile([0, 1, 0])
    assert payoff(P3, spec, s, 1) == pytest.approx(float(f(1.0)) - 1)
    assert payoff(P3, spec, s, 0) == pytest.approx(float(f(1.0)))
    zero = make_profile([0, 0, 0])
    assert all(payoff(P3, spec, zero, i) == 0 for i in range(3))
    report = payoff_report(P3, spec, s)
    assert [e.exposure for e in report] == [1, 1, 1]
    assert [e.active for e in report] == [False, True, False]
    assert exposure(P3, s, 1) == 1


def test_ordinal_compare_examples():
    spec = GameSpec()
    assert ordinal_compare(P3, spec, make_profile([0, 1, 0]), 0, 1) == 1
    s = make_profile([1, 0, 1])
    assert ordinal_compare(P3, spec, s, 0, 2) == 0
    assert ordinal_compare(P3, spec, s, 1, 0) == 1
    with pytest.raises(NotAnEquilibrium):
        ordinal_compare(P3, spec, make_profile(["1/2", "1/2", 0]), 0, 1)


@st.composite
def small_graphs(draw):
    n = draw(st.integers(1, 6))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return Topology.from_edges(n, edges)


@given(small_graphs(), st.sampled_from(sorted(BENEFITS)))
def test_ordinal_compare_matches_numeric_payoffs(g, benefit):
    spec = GameSpec(benefit=benefit)
    for sol in enumerate_pne(g, spec):
        s = sol.profile
        values = [payoff(g, spec, s, i) for i in range(g.n)]
        for i in range(g.n):
            for j in range(g.n):
                diff = values[i] - values[j]
                sign = ordinal_compare(g, spec, s, i, j)
                if sign == 0:
                    assert abs(diff) <= 1e-9
                else:
                    assert sign * diff > 1e-9
