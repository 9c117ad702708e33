"""Independent certificate checker.

Deliberately shares no code with the search or the simplex: each leaf is
re-derived from its branch path with a direct degree closure, and linear
leaves are checked by summing the cited constraints with their multipliers.
"""

from __future__ import annotations

import logging
from fractions import Fraction

from .equilibrium import is_pne
from .errors import NotAnEquilibrium, InvalidProfile
from .game import GameSpec
from .graph import Topology
from .pneplus import is_pne_plus
from .prover import ALL_ZERO, ZERO_CLOSURE, LINEAR, Branch, Certificate, Leaf, deep_recursion

log = logging.getLogger(__name__)


class _Reject(Exception):
    pass


def _cited_constraint(g: Topology, delta: Fraction, s_max: Fraction, zeros: set, pos: set, key):
    """Rebuild a cited constraint as (coeffs, sense, rhs), checking it applies."""
    deg = g.degrees

    def live_sum(players):
        return {k: Fraction(1) for k in players if k not in zeros}

    kind = key[0] if key else None
    if kind in ("active", "inactive", "exposure", "positive", "nonneg", "cap") and len(key) == 2:
        i = key[1]
        if not (isinstance(i, int) and 0 <= i < g.n):
            raise _Reject(f"bad player in {key}")
        closed = set(g.adjacency[i]) | {i}
        if kind == "active":
            if i not in pos:
                raise _Reject(f"{key}: player not positive")
            return live_sum(closed), "=", delta
        if kind == "inactive":
            if i not in zeros:
                raise _Reject(f"{key}: player not zero")
            return live_sum(g.adjacency[i]), ">=", delta
        if kind == "exposure":
            return live_sum(closed), ">=", delta
        if kind == "positive":
            if i not in pos:
                raise _Reject(f"{key}: player not positive")
            return {i: Fraction(1)}, ">", Fraction(0)
        if i in zeros:
            raise _Reject(f"{key}: player fixed to zero")
        if kind == "nonneg":
            return {i: Fraction(1)}, ">=", Fraction(0)
        return {i: Fraction(-1)}, ">=", -s_max
    if kind in ("order_pos", "order_zero") and len(key) == 3:
        hi, lo = key[1], key[2]
        if not all(isinstance(p, int) and 0 <= p < g.n for p in (hi, lo)) or deg[hi] <= deg[lo]:
            raise _Reject(f"{key}: needs deg(hi) > deg(lo)")
        if kind == "order_pos":
            if hi not in pos or lo not in pos:
                raise _Reject(f"{key}: players not both positive")
            return {lo: Fraction(1), hi: Fraction(-1)}, ">=", Fraction(0)
        if hi not in zeros or lo not in zeros:
            raise _Reject(f"{key}: players not both zero")
        coeffs: dict = {}
        for k in g.adjacency[hi]:
            if k not in zeros:
                coeffs[k] = coeffs.get(k, 0) + 1
        for k in g.adjacency[lo]:
            if k not in zeros:
                coeffs[k] = coeffs.get(k, 0) - 1
        return coeffs, ">=", Fraction(0)
    raise _Reject(f"unknown constraint key {key!r}")


def _check_leaf(g: Topology, spec: GameSpec, path: dict, leaf: Leaf) -> None:
    deg = g.degrees
    zeros = {p for p, v in path.items() if v == "zero"}
    if zeros:
        d = min(deg[u] for u in zeros)
        zeros |= {v for v in range(g.n) if deg[v] > d}
    pos = {p for p, v in path.items() if v == "pos"} - zeros

    if leaf.reason == ZERO_CLOSURE:
        if len(leaf.players) != 2:
            raise _Reject("closure conflict names two players")
        u, v = leaf.players
        if not (u in zeros and path.get(v) == "pos" and deg[u] < deg[v]):
            raise _Reject(f"no zero-propagation conflict between {u} and {v}")
        return
    if leaf.reason == ALL_ZERO:
        if not leaf.players:
            raise _Reject("InactiveNeighborhoodAllZero names a player")
        i = leaf.players[0]
        if not (0 <= i < g.n and i in zeros and all(j in zeros for j in g.adjacency[i])):
            raise _Reject(f"player {i} is not a zero player with all-zero neighbors")
        return
    if leaf.reason == LINEAR:
        if not leaf.constraints:
            raise _Reject("LinearInfeasible leaf cites no constraints")
        total: dict = {}
        b = Fraction(0)
        strict = Fraction(0)
        for key, y in leaf.constraints:
            coeffs, sense, rhs = _cited_constraint(g, spec.delta, spec.s_max, zeros, pos, tuple(key))
            if sense != "=" and y < 0:
                raise _Reject(f"negative multiplier on inequality {key}")
            for var, a in coeffs.items():
                total[var] = total.get(var, 0) + y * a
            b += y * rhs
            if sense == ">":
                strict += y
        if any(total.values()):
            raise _Reject("multipliers do not cancel the variables")
        if not (b > 0 or (b == 0 and strict > 0)):
            raise _Reject("combination is not contradictory")
        return
    raise _Reject(f"unknown leaf reason {leaf.reason!r}")


def _walk(g: Topology, spec: GameSpec, node, path: dict) -> None:
    # iterative: proof trees can be hundreds of levels deep
    stack = [(node, dict(path))]
    while stack:
        cur, p = stack.pop()
        if isinstance(cur, Leaf):
            _check_leaf(g, spec, p, cur)
        elif isinstance(cur, Branch):
            if not (isinstance(cur.player, int) and 0 <= cur.player < g.n) or cur.player in p:
                raise _Reject(f"bad branch player {cur.player}")
            if cur.zero is None or cur.pos is None:
                raise _Reject("branch node lacks a child")
            stack.append((cur.pos, {**p, cur.player: "pos"}))
            stack.append((cur.zero, {**p, cur.player: "zero"}))
        else:
            raise _Reject("malformed proof node")


def replay_certificate(g: Topology, spec: GameSpec, cert: Certificate) -> bool:
    """True iff ``cert`` is a valid witness or emptiness proof for ``(g, spec)``."""
    try:
        if cert.graph_n is not None and cert.graph_n != g.n:
            raise _Reject("certificate is for a different player count")
        if cert.graph_sha256 is not None and cert.graph_sha256 != g.fingerprint():
            raise _Reject("certificate is for a different topology")
        if cert.game is not None and cert.game != spec.to_json_obj():
            raise _Reject("certificate is for different game parameters")
        if cert.verdict == "witness":
            s = cert.witness
            if s is None or len(s) != g.n:
                raise _Reject("witness has the wrong length")
            try:
                return bool(is_pne(g, spec, s)) and bool(is_pne_plus(g, spec, s))
            except (NotAnEquilibrium, InvalidProfile):
                return False
        if cert.verdict == "empty":
            if cert.proof_tree is None:
                raise _Reject("no proof tree")
            with deep_recursion(10**4):
                _walk(g, spec, cert.proof_tree, {})
            return True
        raise _Reject(f"nothing to replay for verdict {cert.verdict!r}")
    except _Reject as exc:
        log.info("replay rejected: %s", exc)
        return False
