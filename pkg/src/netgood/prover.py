"""Decide whether a topology admits a degree-monotone equilibrium.

Branch-and-propagate over zero/positive sign patterns.  Every player is
split into a Zero child (explored first) and a Pos child, lowest degree
first.  After each split three rules run to fixpoint:

* R1: a zero-effort player whose neighbors are all zero sees nothing,
  which the inactive branch forbids.
* R2: a zero-effort player forces zero effort on every strictly
  higher-degree player (zero propagation).
* R3: a positive player ``i`` has exposure exactly delta while any ``j``
  with ``N[j]`` inside ``N[i]`` has exposure at least delta, so no player
  of ``N[i] - N[j]`` can be positive.

Fully determined patterns, and every ``interior_every`` levels the
partial ones, are settled by exact linear feasibility.  Closed leaves keep
a replayable reason; linear ones carry Farkas multipliers.
"""

from __future__ import annotations

import contextlib
import logging
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from . import lp
from .equilibrium import is_pne
from .game import GameSpec, format_rational, parse_rational
from .graph import Topology
from .pneplus import is_pne_plus

log = logging.getLogger(__name__)

ZERO, POS = "zero", "pos"

ZERO_CLOSURE = "Lemma1Conflict"
ALL_ZERO = "InactiveNeighborhoodAllZero"
LINEAR = "LinearInfeasible"
REASONS = (ZERO_CLOSURE, ALL_ZERO, LINEAR)

DEFAULT_BUDGET_NODES = 10**6
DEFAULT_BUDGET_SECS = 300.0
DEFAULT_INTERIOR_EVERY = 4


@dataclass
class Leaf:
    reason: str
    players: tuple[int, ...]
    constraints: tuple = ()   # ((key, multiplier), ...) for linear leaves
    rule: str = ""


@dataclass
class Branch:
    player: int
    zero: "ProofNode"
    pos: "ProofNode"


ProofNode = Union[Leaf, Branch]


@dataclass
class Certificate:
    verdict: str                      # "witness" | "empty" | "undecided"
    witness: tuple[Fraction, ...] | None = None
    proof_tree: ProofNode | None = None
    graph_n: int | None = None
    graph_sha256: str | None = None
    game: dict | None = None
    stats: dict = field(default_factory=dict)


class _Budget(Exception):
    pass


class _Found(Exception):
    def __init__(self, profile):
        self.profile = profile


@contextlib.contextmanager
def deep_recursion(limit: int):
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


def pattern_constraints(g: Topology, spec: GameSpec, state: list,
                        full: bool) -> list[lp.LinearConstraint]:
    """Linear conditions every equilibrium-with-property completing ``state`` meets.

    Variables are the efforts of players not fixed to zero.  Unknown players
    only contribute the always-valid ``exposure >= delta``.  Exposure
    ordering between zero players is added only when ``full``.
    """
    C = lp.LinearConstraint
    live = [i for i in range(g.n) if state[i] != ZERO]
    live_set = set(live)
    cons = []
    for i in range(g.n):
        closed = {j: 1 for j in g.adjacency[i] if j in live_set}
        if state[i] == ZERO:
            cons.append(C(("inactive", i), closed, lp.GE, spec.delta))
            continue
        closed[i] = 1
        if state[i] == POS:
            cons.append(C(("active", i), closed, lp.EQ, spec.delta))
            cons.append(C(("positive", i), {i: 1}, lp.GT, 0))
        else:
            cons.append(C(("nonneg", i), {i: 1}, lp.GE, 0))
            cons.append(C(("exposure", i), closed, lp.GE, spec.delta))
        cons.append(C(("cap", i), {i: -1}, lp.GE, -spec.s_max))
    deg = g.degrees
    pos = [i for i in live if state[i] == POS]
    for d, hi_players, lo_players in _class_boundaries(deg, pos):
        m = ("bound", "pos", d)
        for hi in hi_players:
            cons.append(C(("pos_above", d, hi), {m: 1, hi: -1}, lp.GE, 0))
        for lo in lo_players:
            cons.append(C(("pos_below", d, lo), {lo: 1, m: -1}, lp.GE, 0))
    if full:
        zeros = [i for i in range(g.n) if state[i] == ZERO]

        def exposure_of(i, sign):
            return {k: sign for k in g.adjacency[i] if k in live_set}

        for d, hi_players, lo_players in _class_boundaries(deg, zeros):
            m = ("bound", "zero", d)
            for hi in hi_players:
                cons.append(C(("zero_above", d, hi), {**exposure_of(hi, 1), m: -1}, lp.GE, 0))
            for lo in lo_players:
                cons.append(C(("zero_below", d, lo), {**exposure_of(lo, -1), m: 1}, lp.GE, 0))
    return cons


def _class_boundaries(deg, players):
    """``(d, upper class, lower class)`` for consecutive degree classes, where
    ``d`` is the lower class's degree.

    Ordering between two adjacent classes is stated through one free variable
    ``m`` per boundary (upper values on one side of ``m``, lower values on the
    other) instead of one row per pair.
    """
    classes: dict[int, list[int]] = {}
    for p in players:
        classes.setdefault(deg[p], []).append(p)
    keys = sorted(classes)
    for lo_d, hi_d in zip(keys, keys[1:]):
        yield lo_d, classes[hi_d], classes[lo_d]


def _expand_order(mult: dict) -> dict:
    """Rewrite multipliers on boundary rows as multipliers on pairwise rows.

    At each boundary the weights above and below balance (the boundary
    variable cancels), so a northwest-corner split gives nonnegative pair
    weights with the same row and column sums and the same combination.
    """
    out: dict = {}
    sides: dict = {}
    for key, y in mult.items():
        if key[0] in ("pos_above", "pos_below", "zero_above", "zero_below"):
            kind, side = key[0].split("_")
            sides.setdefault((kind, key[1]), {"above": [], "below": []})[side].append((key[2], y))
        else:
            out[key] = y
    for (kind, _), sd in sorted(sides.items()):
        above = sorted(sd["above"])
        below = sorted(sd["below"])
        if sum(y for _, y in above) != sum(y for _, y in below):
            raise RuntimeError("internal error: boundary weights do not balance")
        a = b = 0
        ra = above[0][1] if above else 0
        rb = below[0][1] if below else 0
        while a < len(above) and b < len(below):
            w = min(ra, rb)
            if w:
                key = (f"order_{kind}", above[a][0], below[b][0])
                out[key] = out.get(key, 0) + w
            ra -= w
            rb -= w
            if ra == 0:
                a += 1
                ra = above[a][1] if a < len(above) else 0
            if rb == 0:
                b += 1
                rb = below[b][1] if b < len(below) else 0
    return out


class _Search:
    def __init__(self, g: Topology, spec: GameSpec, budget_nodes: int,
                 budget_secs: float, interior_every: int):
        self.g = g
        self.spec = spec
        self.deg = g.degrees
        self.order = sorted(range(g.n), key=lambda i: (self.deg[i], i))
        self.budget_nodes = budget_nodes
        self.deadline = time.monotonic() + budget_secs
        self.interior_every = interior_every
        self.nodes = 0
        self.lp_calls = 0
        closed = [g.closed_neighborhood(i) for i in range(g.n)]
        # (j, N[i] - N[j]) for every j whose closed neighborhood sits inside i's
        self.dominated = []
        for i in range(g.n):
            pairs = []
            for j in g.adjacency[i]:
                if closed[j] <= closed[i]:
                    pairs.append((j, tuple(sorted(closed[i] - closed[j]))))
            self.dominated.append(pairs)

    # -- propagation -----------------------------------------------------

    def propagate(self, state: list, last: int | None) -> Leaf | None:
        g, deg = self.g, self.deg
        zeros = [i for i in range(g.n) if state[i] == ZERO]
        if zeros:
            d = min(deg[u] for u in zeros)
            source = next(u for u in zeros if deg[u] == d)
            for v in range(g.n):
                if deg[v] > d:
                    if state[v] == POS:
                        return Leaf(ZERO_CLOSURE, (source, v), rule="R2")
                    state[v] = ZERO
        scan = list(g.adjacency[last]) + [last] if last is not None else []
        for i in scan + list(range(g.n)):
            if state[i] == ZERO and all(state[j] == ZERO for j in g.adjacency[i]):
                return Leaf(ALL_ZERO, (i,) + g.adjacency[i], rule="R1")
        for i in range(g.n):
            if state[i] != POS:
                continue
            for j, diff in self.dominated[i]:
                k = next((k for k in diff if state[k] == POS), None)
                if k is not None:
                    return Leaf(LINEAR, (i, j, k), self._r3_multipliers(state, i, j, diff),
                                rule="R3")
        return None

    def _r3_multipliers(self, state, i, j, diff):
        keyed = {POS: "active", ZERO: "inactive", None: "exposure"}
        mult = [(("active", i), Fraction(-1)), ((keyed[state[j]], j), Fraction(1))]
        for k in diff:
            if state[k] == POS:
                mult.append((("positive", k), Fraction(1)))
            elif state[k] is None:
                mult.append((("nonneg", k), Fraction(1)))
        return tuple(mult)

    # -- linear feasibility ----------------------------------------------

    def linear_check(self, state: list, full: bool) -> Leaf | None:
        self.lp_calls += 1
        cons = pattern_constraints(self.g, self.spec, state, full)
        res = lp.max_slack(cons)
        if res.feasible:
            if full:
                s = tuple(res.point.get(i, Fraction(0)) if state[i] == POS else Fraction(0)
                          for i in range(self.g.n))
                raise _Found(s)
            return None
        mult = res.certificate if res.certificate is not None else lp.farkas_dual(cons)
        if mult is None:
            raise RuntimeError("simplex reported infeasible but no Farkas certificate exists")
        mult = _expand_order(mult)
        keys = sorted(mult, key=repr)
        return Leaf(LINEAR, (), tuple((k, mult[k]) for k in keys), rule="LP")

    # -- search ----------------------------------------------------------

    def run(self, state: list, depth: int, last: int | None) -> ProofNode:
        self.nodes += 1
        if self.nodes > self.budget_nodes or time.monotonic() > self.deadline:
            raise _Budget()
        leaf = self.propagate(state, last)
        if leaf is not None:
            return leaf
        player = next((i for i in self.order if state[i] is None), None)
        if player is None:
            leaf = self.linear_check(state, full=True)
            assert leaf is not None
            return leaf
        if depth and depth % self.interior_every == 0:
            leaf = self.linear_check(state, full=False)
            if leaf is not None:
                return leaf
        children = {}
        for sign in (ZERO, POS):
            child = list(state)
            child[player] = sign
            children[sign] = self.run(child, depth + 1, player)
        return Branch(player, children[ZERO], children[POS])


def decide_pne_plus(g: Topology, spec: GameSpec, *, budget_nodes: int = DEFAULT_BUDGET_NODES,
                    budget_secs: float = DEFAULT_BUDGET_SECS,
                    interior_every: int = DEFAULT_INTERIOR_EVERY) -> Certificate:
    """Witness profile, emptiness proof tree, or ``undecided`` on budget exhaustion."""
    search = _Search(g, spec, budget_nodes, budget_secs, interior_every)
    meta = dict(graph_n=g.n, graph_sha256=g.fingerprint(), game=spec.to_json_obj())
    start = time.monotonic()
    try:
        with deep_recursion(20 * g.n + 2000):
            tree = search.run([None] * g.n, 0, None)
    except _Found as found:
        s = found.profile
        if not (is_pne(g, spec, s) and is_pne_plus(g, spec, s)):
            raise RuntimeError("internal error: witness fails verification")
        cert = Certificate("witness", witness=s, **meta)
    except _Budget:
        cert = Certificate("undecided", **meta)
    else:
        cert = Certificate("empty", proof_tree=tree, **meta)
    cert.stats = {"nodes": search.nodes, "lp_calls": search.lp_calls}
    log.info("decide_pne_plus: %s after %d nodes, %d LPs, %.2fs", cert.verdict,
             search.nodes, search.lp_calls, time.monotonic() - start)
    return cert


# -- serialization -----------------------------------------------------------

def _node_to_json(node: ProofNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": {"reason": node.reason, "rule": node.rule, "players": list(node.players),
                         "constraints": [[list(k), format_rational(y)] for k, y in node.constraints]}}
    return {"node": {"player": node.player,
                     "children": {"zero": _node_to_json(node.zero), "pos": _node_to_json(node.pos)}}}


def _node_from_json(obj) -> ProofNode:
    from .errors import CertificateError

    if not isinstance(obj, dict) or len(obj) != 1:
        raise CertificateError("proof node must be an object with one of 'node' or 'leaf'")
    if "leaf" in obj:
        leaf = obj["leaf"]
        try:
            cons = tuple((tuple(k), parse_rational(y)) for k, y in leaf.get("constraints", []))
            return Leaf(leaf["reason"], tuple(int(p) for p in leaf.get("players", [])),
                        cons, leaf.get("rule", ""))
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateError(f"bad leaf: {exc}") from exc
    if "node" in obj:
        node = obj["node"]
        try:
            ch = node["children"]
            return Branch(int(node["player"]), _node_from_json(ch["zero"]),
                          _node_from_json(ch["pos"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateError(f"bad branch node: {exc}") from exc
    raise CertificateError("proof node must be an object with one of 'node' or 'leaf'")


def certificate_to_json(cert: Certificate) -> dict:
    out = {"verdict": cert.verdict,
           "graph": {"n": cert.graph_n, "sha256": cert.graph_sha256},
           "game": cert.game}
    if cert.witness is not None:
        out["witness"] = [format_rational(v) for v in cert.witness]
    if cert.proof_tree is not None:
        with deep_recursion(10**5):
            out["proof_tree"] = _node_to_json(cert.proof_tree)
    out["stats"] = cert.stats
    return out


def certificate_from_json(obj: dict) -> Certificate:
    from .errors import CertificateError

    if not isinstance(obj, dict) or obj.get("verdict") not in ("witness", "empty", "undecided"):
        raise CertificateError("certificate needs a verdict of witness, empty or undecided")
    graph = obj.get("graph") or {}
    cert = Certificate(obj["verdict"], graph_n=graph.get("n"), graph_sha256=graph.get("sha256"),
                       game=obj.get("game"), stats=obj.get("stats") or {})
    try:
        if "witness" in obj:
            cert.witness = tuple(parse_rational(v) for v in obj["witness"])
    except (TypeError, ValueError) as exc:
        raise CertificateError(f"bad witness: {exc}") from exc
    if "proof_tree" in obj:
        with deep_recursion(10**5):
            cert.proof_tree = _node_from_json(obj["proof_tree"])
    if cert.verdict == "witness" and cert.witness is None:
        raise CertificateError("witness certificate without a witness")
    if cert.verdict == "empty" and cert.proof_tree is None:
        raise CertificateError("empty certificate without a proof tree")
    return cert


def proof_stats(node: ProofNode) -> dict:
    """Counts of branch nodes and leaves by rule, plus the maximum depth."""
    counts: dict = {"branches": 0, "leaves": 0, "depth": 0}
    stack = [(node, 0)]
    while stack:
        cur, d = stack.pop()
        counts["depth"] = max(counts["depth"], d)
        if isinstance(cur, Leaf):
            counts["leaves"] += 1
            counts[cur.rule or cur.reason] = counts.get(cur.rule or cur.reason, 0) + 1
        else:
            counts["branches"] += 1
            stack.append((cur.pos, d + 1))
            stack.append((cur.zero, d + 1))
    return counts
