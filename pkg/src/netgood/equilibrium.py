"""Equilibrium checks, best responses, dynamics and exact enumeration."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import lp
from .errors import LimitExceeded
from .game import (GameSpec, Profile, check_profile, format_rational, neighbor_sum,
                   profile_to_json)
from .graph import Topology

DEFAULT_N_LIMIT = 20


@dataclass(frozen=True)
class Violation:
    player: int
    neighbor_sum: Fraction
    played: Fraction
    required: Fraction

    def __str__(self):
        return (f"player {self.player}: neighbors sum to {self.neighbor_sum}, "
                f"plays {self.played}, best response is {self.required}")


@dataclass(frozen=True)
class PneCheck:
    ok: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self):
        return self.ok


def _required(delta: Fraction, nsum: Fraction) -> Fraction:
    return delta - nsum if nsum < delta else Fraction(0)


def is_pne(g: Topology, spec: GameSpec, s: Sequence[Fraction]) -> PneCheck:
    """Exact two-branch equilibrium test with a per-player violation report."""
    check_profile(g, spec, s)
    bad = []
    for i in range(g.n):
        nsum = neighbor_sum(g, s, i)
        need = _required(spec.delta, nsum)
        if s[i] != need:
            bad.append(Violation(i, nsum, s[i], need))
    return PneCheck(not bad, tuple(bad))


def best_response(g: Topology, spec: GameSpec, s: Sequence[Fraction], i: int) -> Fraction:
    br = _required(spec.delta, neighbor_sum(g, s, i))
    return min(br, spec.s_max)


@dataclass
class DynamicsResult:
    profile: Profile
    converged: bool
    trace: list[Fraction] = field(default_factory=list)


def br_dynamics(g: Topology, spec: GameSpec, s0: Sequence[Fraction],
                schedule: str = "round-robin", max_iters: int = 1000,
                order: Sequence[int] | None = None) -> DynamicsResult:
    """Iterate best responses; one iteration is a full sweep over players.

    ``trace[k]`` is the largest absolute change during sweep ``k``.  The run
    converges when a sweep changes nothing.  This is a heuristic search for
    fixed points, not an existence argument.
    """
    if schedule not in ("round-robin", "synchronous"):
        raise ValueError(f"unknown schedule {schedule!r}")
    check_profile(g, spec, s0)
    s = list(s0)
    order = list(range(g.n)) if order is None else list(order)
    trace: list[Fraction] = []
    for _ in range(max_iters):
        if schedule == "synchronous":
            new = [best_response(g, spec, s, i) for i in range(g.n)]
            change = max((abs(a - b) for a, b in zip(new, s)), default=Fraction(0))
            s = new
        else:
            change = Fraction(0)
            for i in order:
                br = best_response(g, spec, s, i)
                change = max(change, abs(br - s[i]))
                s[i] = br
        trace.append(change)
        if change == 0:
            return DynamicsResult(tuple(s), True, trace)
    return DynamicsResult(tuple(s), False, trace)


# -- active sets -------------------------------------------------------------

@dataclass(frozen=True)
class EquilibriumSolution:
    """Equilibria whose positive-effort players are exactly ``active_set``.

    For a singular system ``profile`` is one canonical member of the family
    (the point maximising the smallest active effort) and ``kernel_dim`` is
    the dimension of the solution space of the active equations.
    """

    active_set: tuple[int, ...]
    profile: Profile
    degenerate: bool = False
    kernel_dim: int = 0

    def to_json_obj(self) -> dict:
        return {"active_set": list(self.active_set), "profile": profile_to_json(self.profile),
                "degenerate": self.degenerate, "kernel_dim": self.kernel_dim}


def _rref(matrix: list[list[Fraction]], rhs: list[Fraction]):
    """Gauss-Jordan elimination.  Returns (pivot columns, reduced rows, rhs) or
    None if inconsistent."""
    rows = [r[:] + [b] for r, b in zip(matrix, rhs)]
    m = len(rows)
    ncols = len(matrix[0]) if matrix else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((k for k in range(r, m) if rows[k][c] != 0), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for k in range(m):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    for k in range(r, m):
        if rows[k][-1] != 0:
            return None
    return pivots, rows[:r]


def active_system(g: Topology, spec: GameSpec, active: Sequence[int]):
    """(I + adjacency restricted to ``active``) and the constant right-hand side."""
    idx = {p: k for k, p in enumerate(active)}
    mat = [[Fraction(0)] * len(active) for _ in active]
    for p, k in idx.items():
        mat[k][k] = Fraction(1)
        for q in g.adjacency[p]:
            if q in idx:
                mat[k][idx[q]] = Fraction(1)
    return mat, [spec.delta] * len(active)


def family_constraints(g: Topology, spec: GameSpec, active: Sequence[int]) -> list[lp.LinearConstraint]:
    """Equilibrium conditions for a fixed active set, as exact linear constraints."""
    aset = set(active)
    cons = []
    for i in active:
        coeffs = {i: 1}
        for j in g.adjacency[i]:
            if j in aset:
                coeffs[j] = 1
        cons.append(lp.LinearConstraint(("active", i), coeffs, lp.EQ, spec.delta))
        cons.append(lp.LinearConstraint(("positive", i), {i: 1}, lp.GT, 0))
        cons.append(lp.LinearConstraint(("cap", i), {i: -1}, lp.GE, -spec.s_max))
    for i in range(g.n):
        if i in aset:
            continue
        coeffs = {j: 1 for j in g.adjacency[i] if j in aset}
        cons.append(lp.LinearConstraint(("inactive", i), coeffs, lp.GE, spec.delta))
    return cons


def _dominates(g: Topology, aset: set) -> bool:
    return all(i in aset or any(j in aset for j in g.adjacency[i]) for i in range(g.n))


def solve_active_set(g: Topology, spec: GameSpec,
                     active: Iterable[int]) -> EquilibriumSolution | None:
    """Solve the active equations; None when no equilibrium has this active set."""
    active = tuple(sorted(set(active)))
    if any(not (0 <= i < g.n) for i in active):
        raise ValueError("active set has out-of-range players")
    aset = set(active)
    if not active or not _dominates(g, aset):
        # an inactive player with no active neighbor sees 0 < delta
        return None
    mat, rhs = active_system(g, spec, active)
    reduced = _rref(mat, rhs)
    if reduced is None:
        return None
    pivots, rows = reduced
    kernel_dim = len(active) - len(pivots)
    if kernel_dim == 0:
        values = {active[c]: row[-1] for c, row in zip(pivots, rows)}
        if any(v <= 0 or v > spec.s_max for v in values.values()):
            return None
        s = tuple(values.get(i, Fraction(0)) for i in range(g.n))
        for i in range(g.n):
            if i not in aset and neighbor_sum(g, s, i) < spec.delta:
                return None
        return EquilibriumSolution(active, s)
    res = lp.max_slack(family_constraints(g, spec, active))
    if not res.feasible:
        return None
    s = tuple(res.point.get(i, Fraction(0)) if i in aset else Fraction(0) for i in range(g.n))
    return EquilibriumSolution(active, s, True, kernel_dim)


def canonical_active_sets(n: int):
    """All subsets of ``range(n)`` in lexicographic order of their sorted members."""
    def rec(prefix, start):
        yield tuple(prefix)
        for i in range(start, n):
            prefix.append(i)
            yield from rec(prefix, i + 1)
            prefix.pop()
    return rec([], 0)


def _solve_chunk(args):
    g, spec, sets = args
    return [solve_active_set(g, spec, a) for a in sets]


def active_set_verdicts(g: Topology, spec: GameSpec, n_limit: int = DEFAULT_N_LIMIT,
                        workers: int = 1) -> list[tuple[tuple[int, ...], EquilibriumSolution | None]]:
    """``(active_set, solution-or-None)`` for every subset, canonical order."""
    if g.n > n_limit:
        raise LimitExceeded(f"{g.n} players exceeds the enumeration limit {n_limit}")
    sets = list(canonical_active_sets(g.n))
    if workers <= 1 or len(sets) < 256:
        sols = [solve_active_set(g, spec, a) for a in sets]
    else:
        size = -(-len(sets) // (workers * 4))
        chunks = [(g, spec, sets[k:k + size]) for k in range(0, len(sets), size)]
        with ProcessPoolExecutor(max_workers=workers) as ex:
            sols = [s for part in ex.map(_solve_chunk, chunks) for s in part]
    return list(zip(sets, sols))


def _subsumed(g: Topology, spec: GameSpec, small: EquilibriumSolution,
              big: EquilibriumSolution) -> bool:
    """Whether the family of ``small`` lies in the closure of the family of ``big``.

    Points of ``small`` give zero effort to ``big``'s extra players, so they
    are limits of ``big``'s family iff those players see exactly delta
    everywhere on ``small``'s family.
    """
    extra = set(big.active_set) - set(small.active_set)
    cons = [c if c.sense != lp.GT else lp.LinearConstraint(c.key, c.coeffs, lp.GE, c.rhs)
            for c in family_constraints(g, spec, small.active_set)]
    objective: dict = {}
    for i in extra:
        for j in g.adjacency[i]:
            if j in small.active_set:
                objective[j] = objective.get(j, 0) + 1
    if not objective:
        return False
    best, _ = lp.maximize(objective, cons)
    return best == spec.delta * len(extra)


def fold_families(g: Topology, spec: GameSpec,
                  sols: list[EquilibriumSolution]) -> list[EquilibriumSolution]:
    """Drop degenerate families that are boundary faces of a larger family."""
    degenerate = [s for s in sols if s.degenerate]
    out = []
    for s in sols:
        if s.degenerate and any(
                set(s.active_set) < set(b.active_set) and _subsumed(g, spec, s, b)
                for b in degenerate):
            continue
        out.append(s)
    return out


def enumerate_pne(g: Topology, spec: GameSpec, n_limit: int = DEFAULT_N_LIMIT,
                  fold: bool = True, workers: int | None = None) -> list[EquilibriumSolution]:
    """Every equilibrium, grouped by active set, in canonical active-set order.

    Isolated equilibria are listed individually.  A singular active system
    is listed once with a sample point; with ``fold`` such a family is
    omitted when it is a face of a larger degenerate family.
    """
    if workers is None:
        workers = int(os.environ.get("NETGOOD_THREADS", "1") or 1)
    sols = [s for _, s in active_set_verdicts(g, spec, n_limit, workers) if s is not None]
    return fold_families(g, spec, sols) if fold else sols


def describe(sol: EquilibriumSolution) -> str:
    prof = ", ".join(format_rational(v) for v in sol.profile)
    tag = f" [degenerate, kernel dim {sol.kernel_dim}]" if sol.degenerate else ""
    return f"active {list(sol.active_set)}: ({prof}){tag}"
