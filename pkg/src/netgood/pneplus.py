"""Degree-monotone payoff property of equilibria, and zero propagation."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import lp
from .equilibrium import family_constraints, is_pne
from .errors import NotAnEquilibrium
from .game import GameSpec, compare_at_equilibrium
from .graph import Topology


@dataclass(frozen=True)
class PnePlusVerdict:
    is_member: bool
    violations: tuple[tuple[int, int], ...] = ()

    def __bool__(self):
        return self.is_member

    def to_json_obj(self) -> dict:
        return {"member": self.is_member, "violations": [list(v) for v in self.violations]}


def is_pne_plus(g: Topology, spec: GameSpec, s: Sequence[Fraction]) -> PnePlusVerdict:
    """Check every ordered pair with ``deg(i) > deg(j)`` for ``payoff_i >= payoff_j``.

    Comparisons are ordinal, so the configured benefit function is never
    evaluated.  Equal degrees impose nothing.
    """
    if not is_pne(g, spec, s):
        raise NotAnEquilibrium("profile is not a pure Nash equilibrium")
    deg = g.degrees
    bad = []
    for i in range(g.n):
        for j in range(g.n):
            if deg[i] > deg[j] and compare_at_equilibrium(g, s, i, j) < 0:
                bad.append((i, j))
    return PnePlusVerdict(not bad, tuple(bad))


def propagate_zeros(g: Topology, zeros: Iterable[int]) -> frozenset[int]:
    """Close a set of zero-effort players under the degree rule.

    A zero-effort player forces zero effort on every strictly higher-degree
    player, so everyone of degree above the smallest zero degree joins.
    """
    zeros = frozenset(zeros)
    if not zeros:
        return zeros
    d = min(g.degree(u) for u in zeros)
    return zeros | {v for v in range(g.n) if g.degree(v) > d}


def ordering_constraints(g: Topology, active: Iterable[int]) -> list[lp.LinearConstraint] | None:
    """Degree-monotonicity constraints for a fixed active set.

    Returns None if some active player out-degrees an inactive one (that pair
    can never satisfy the property).  Active pairs need ``s_i <= s_j`` and
    inactive pairs ``T_i >= T_j`` whenever ``deg(i) > deg(j)``; only adjacent
    degree classes are emitted, the rest follow by transitivity.
    """
    aset = set(active)
    deg = g.degrees
    inactive = [i for i in range(g.n) if i not in aset]
    if aset and inactive and max(deg[i] for i in aset) > min(deg[j] for j in inactive):
        return None
    cons = []
    for hi, lo in _adjacent_class_pairs(deg, sorted(aset)):
        cons.append(lp.LinearConstraint(("order_pos", hi, lo), {lo: 1, hi: -1}, lp.GE, 0))
    for hi, lo in _adjacent_class_pairs(deg, inactive):
        coeffs: dict = {}
        for k in g.adjacency[hi]:
            if k in aset:
                coeffs[k] = coeffs.get(k, 0) + 1
        for k in g.adjacency[lo]:
            if k in aset:
                coeffs[k] = coeffs.get(k, 0) - 1
        cons.append(lp.LinearConstraint(("order_zero", hi, lo), coeffs, lp.GE, 0))
    return cons


def _adjacent_class_pairs(deg: Sequence[int], players: Sequence[int]):
    classes: dict[int, list[int]] = {}
    for p in players:
        classes.setdefault(deg[p], []).append(p)
    keys = sorted(classes)
    for lo_d, hi_d in zip(keys, keys[1:]):
        for hi in classes[hi_d]:
            for lo in classes[lo_d]:
                yield hi, lo


def pne_plus_point(g: Topology, spec: GameSpec, active: Iterable[int]):
    """A profile with this active set that is an equilibrium with the property, or None."""
    active = sorted(set(active))
    order = ordering_constraints(g, active)
    if order is None or not active:
        return None
    res = lp.max_slack(family_constraints(g, spec, active) + order)
    if not res.feasible:
        return None
    return tuple(res.point.get(i, Fraction(0)) if i in active else Fraction(0)
                 for i in range(g.n))
