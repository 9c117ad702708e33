"""Brute-force reference checks for small instances.

Feasibility here is decided by equality substitution followed by
Fourier-Motzkin elimination, so nothing is shared with the simplex or the
Gauss-Jordan solver used elsewhere.  The grid check evaluates the concrete
benefit function numerically and is advisory only.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import LimitExceeded
from .game import GameSpec, format_rational, profile_to_json
from .graph import Topology, from_json_obj, to_json_obj

ORACLE_N_LIMIT = 12

# A row is (coeffs: dict[var, Fraction], kind: "=" | ">=" | ">", rhs: Fraction)


def _substitute(rows, var, expr_coeffs, expr_const):
    """Replace ``var`` by ``expr_coeffs . x + expr_const`` in every row."""
    out = []
    for coeffs, kind, rhs in rows:
        a = coeffs.get(var)
        if a is None:
            out.append((coeffs, kind, rhs))
            continue
        new = {k: v for k, v in coeffs.items() if k != var}
        for k, v in expr_coeffs.items():
            new[k] = new.get(k, 0) + a * v
        new = {k: v for k, v in new.items() if v != 0}
        out.append((new, kind, rhs - a * expr_const))
    return out


def _normalise(coeffs, kind, rhs):
    scale = max(abs(v) for v in coeffs.values())
    return tuple(sorted((k, v / scale) for k, v in coeffs.items())), kind, rhs / scale


def fm_feasible(rows, variables):
    """Decide feasibility by elimination.

    Returns ``(feasible, free_count, solution)`` where ``free_count`` is the
    number of variables left undetermined by the equalities and
    ``solution`` is the unique point when ``free_count == 0`` and feasible.
    """
    rows = [(dict(c), k, Fraction(r)) for c, k, r in rows]
    eliminated = []   # (var, coeffs, const) back-substitution chain
    while True:
        eq = next((r for r in rows if r[1] == "=" and r[0]), None)
        if eq is None:
            break
        coeffs, _, rhs = eq
        var = min(coeffs, key=repr)
        a = coeffs[var]
        expr = {k: -v / a for k, v in coeffs.items() if k != var}
        const = rhs / a
        rows.remove(eq)
        rows = _substitute(rows, var, expr, const)
        eliminated.append((var, expr, const))
    free = [v for v in variables if v not in {e[0] for e in eliminated}]
    ineq = []
    for coeffs, kind, rhs in rows:
        if not coeffs:
            ok = {"=": rhs == 0, ">=": 0 >= rhs, ">": 0 > rhs}[kind]
            if not ok:
                return False, len(free), None
            continue
        ineq.append((coeffs, kind, rhs))
    current = {_normalise(*r) for r in ineq}
    for var in free:
        lower, upper, nxt = [], [], set()
        for row in current:
            a = dict(row[0]).get(var, 0)
            if a > 0:
                lower.append((row, a))
            elif a < 0:
                upper.append((row, a))
            else:
                nxt.add(row)
        for ((cl, kl, rl), al), ((cu, ku, ru), au) in itertools.product(lower, upper):
            # al*x + L >= rl and au*x + U >= ru with al > 0 > au; scale and add
            comb: dict = {}
            for k, v in cl:
                comb[k] = comb.get(k, 0) + v * (-au)
            for k, v in cu:
                comb[k] = comb.get(k, 0) + v * al
            comb = {k: v for k, v in comb.items() if v != 0}
            rhs = rl * (-au) + ru * al
            kind = ">" if ">" in (kl, ku) else ">="
            if comb:
                nxt.add(_normalise(comb, kind, rhs))
            elif not (0 > rhs if kind == ">" else 0 >= rhs):
                return False, len(free), None
        current = nxt
    if current:
        # every remaining row still mentions a variable that was never
        # eliminated, which cannot happen once all free variables are gone
        raise AssertionError("elimination left constrained rows")
    if free:
        return True, len(free), None
    values = {}
    for var, expr, const in reversed(eliminated):
        values[var] = const + sum(v * values[k] for k, v in expr.items())
    return True, 0, values


@dataclass(frozen=True)
class ActiveSetRecord:
    active_set: tuple[int, ...]
    status: str                   # "feasible" | "infeasible" | "degenerate"
    kernel_dim: int
    profile: tuple[Fraction, ...] | None

    def to_json_obj(self) -> dict:
        return {"active_set": list(self.active_set), "status": self.status,
                "kernel_dim": self.kernel_dim,
                "profile": profile_to_json(self.profile) if self.profile else None}


def _check_size(g: Topology):
    if g.n > ORACLE_N_LIMIT:
        raise LimitExceeded(f"oracle handles at most {ORACLE_N_LIMIT} players, got {g.n}")


def _equilibrium_rows(g: Topology, spec: GameSpec, aset: set):
    rows = []
    for i in range(g.n):
        if i in aset:
            coeffs = {i: Fraction(1)}
            coeffs.update({j: Fraction(1) for j in g.adjacency[i] if j in aset})
            rows.append((coeffs, "=", spec.delta))
            rows.append(({i: Fraction(1)}, ">", Fraction(0)))
            rows.append(({i: Fraction(-1)}, ">=", -spec.s_max))
        else:
            rows.append(({j: Fraction(1) for j in g.adjacency[i] if j in aset}, ">=", spec.delta))
    return rows


def _property_rows(g: Topology, aset: set):
    """Pairwise degree-monotonicity rows, or None when an active player
    out-degrees an inactive one."""
    deg = g.degrees
    rows = []
    for i in range(g.n):
        for j in range(g.n):
            if deg[i] <= deg[j]:
                continue
            if i in aset and j in aset:
                rows.append(({j: Fraction(1), i: Fraction(-1)}, ">=", Fraction(0)))
            elif i in aset:
                return None
            elif j not in aset:
                coeffs: dict = {}
                for k in g.adjacency[i]:
                    if k in aset:
                        coeffs[k] = coeffs.get(k, 0) + 1
                for k in g.adjacency[j]:
                    if k in aset:
                        coeffs[k] = coeffs.get(k, 0) - 1
                rows.append(({k: v for k, v in coeffs.items() if v}, ">=", Fraction(0)))
    return rows


def oracle_enumerate(g: Topology, spec: GameSpec) -> list[ActiveSetRecord]:
    """One record per subset of players, ordered by (size, members)."""
    _check_size(g)
    out = []
    for size in range(g.n + 1):
        for active in itertools.combinations(range(g.n), size):
            aset = set(active)
            feasible, free, sol = fm_feasible(_equilibrium_rows(g, spec, aset), list(active))
            if not feasible:
                out.append(ActiveSetRecord(active, "infeasible", free, None))
            elif free:
                out.append(ActiveSetRecord(active, "degenerate", free, None))
            else:
                prof = tuple(sol.get(i, Fraction(0)) for i in range(g.n))
                out.append(ActiveSetRecord(active, "feasible", 0, prof))
    return out


def oracle_pne_plus_sets(g: Topology, spec: GameSpec) -> list[tuple[int, ...]]:
    """Active sets whose equilibria include one with the degree-monotone property."""
    _check_size(g)
    found = []
    for size in range(1, g.n + 1):
        for active in itertools.combinations(range(g.n), size):
            aset = set(active)
            extra = _property_rows(g, aset)
            if extra is None:
                continue
            if fm_feasible(_equilibrium_rows(g, spec, aset) + extra, list(active))[0]:
                found.append(active)
    return found


def oracle_pne_plus_exists(g: Topology, spec: GameSpec) -> bool:
    _check_size(g)
    for size in range(1, g.n + 1):
        for active in itertools.combinations(range(g.n), size):
            aset = set(active)
            extra = _property_rows(g, aset)
            if extra is not None and fm_feasible(
                    _equilibrium_rows(g, spec, aset) + extra, list(active))[0]:
                return True
    return False


def numeric_br_check(g: Topology, spec: GameSpec, s: Sequence[Fraction],
                     step: Fraction | None = None, tol: float = 1e-9) -> bool:
    """Each player's payoff at ``s`` is within ``tol`` of its best grid deviation."""
    step = spec.delta / 1000 if step is None else Fraction(step)
    count = int(spec.s_max // step)
    grid = np.arange(count + 1, dtype=float) * float(step)
    f = spec.f
    c = float(spec.cost)
    for i in range(g.n):
        others = float(sum((s[j] for j in g.adjacency[i]), Fraction(0)))
        current = float(f(others + float(s[i]))) - c * float(s[i])
        best = float(np.max(f(others + grid) - c * grid))
        if current < best - tol:
            return False
    return True


# -- test corpus -------------------------------------------------------------

def all_trees(max_n: int) -> list[Topology]:
    """Every unlabeled tree with 1..max_n players (one labelling each)."""
    import networkx as nx

    out = [Topology(1, ())]
    for n in range(2, max_n + 1):
        for t in nx.nonisomorphic_trees(n):
            out.append(Topology.from_edges(n, sorted(tuple(sorted(e)) for e in t.edges())))
    return out


def random_connected_graphs(count: int, seed: int, min_n: int = 2, max_n: int = 7) -> list[Topology]:
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        n = rng.randint(min_n, max_n)
        p = rng.uniform(0.2, 0.8)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
        g = Topology.from_edges(n, edges)
        if g.is_connected():
            out.append(g)
    return out


def build_corpus(seed: int = 20240917, random_count: int = 200, max_n: int = 7) -> list[tuple[str, Topology]]:
    corpus = [(f"tree-{k}", t) for k, t in enumerate(all_trees(max_n))]
    corpus += [(f"random-{k}", t) for k, t in
               enumerate(random_connected_graphs(random_count, seed, max_n=max_n))]
    return corpus


def write_manifest(path, corpus) -> None:
    # one graph per line keeps the file diffable
    items = [json.dumps({"name": name, **to_json_obj(t)}) for name, t in corpus]
    with open(path, "w") as fh:
        fh.write('{"graphs": [\n' + ",\n".join(items) + "\n]}\n")


def load_manifest(path) -> list[tuple[str, Topology]]:
    with open(path) as fh:
        data = json.load(fh)
    return [(item["name"], from_json_obj(item)) for item in data["graphs"]]


def describe_record(rec: ActiveSetRecord) -> str:
    prof = "" if rec.profile is None else " (" + ", ".join(format_rational(v) for v in rec.profile) + ")"
    return f"{list(rec.active_set)}: {rec.status}{prof}"
