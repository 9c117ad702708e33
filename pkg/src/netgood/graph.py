"""Immutable undirected topologies, tree-family generators and graph I/O."""

from __future__ import annotations

import hashlib
import json
import random
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import GraphError

CANONICAL_LEVEL_DEGREES = (1, 3, 4, 5, 6)
CANONICAL_DEPTH = 6
MIN_CLASS_DEPTH = 5


@dataclass(frozen=True)
class Topology:
    """Undirected simple graph on players ``0..n-1``.

    ``edges`` is stored canonically: each pair as ``(u, v)`` with ``u < v``,
    sorted.  ``adjacency`` is derived and holds sorted neighbor tuples.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise GraphError(f"player count must be a positive integer, got {self.n!r}")
        seen = set()
        canon = []
        for e in self.edges:
            u, v = (int(x) for x in e)
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside [0, {self.n})")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        canon.sort()
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "edges", tuple(canon))
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "Topology":
        return cls(n, tuple(tuple(e) for e in edges))

    def neighbors(self, i: int) -> tuple[int, ...]:
        self._check_player(i)
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        self._check_player(i)
        return len(self.adjacency[i])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    def closed_neighborhood(self, i: int) -> frozenset[int]:
        return frozenset(self.neighbors(i)) | {i}

    def is_connected(self) -> bool:
        return len(bfs_order(self, 0)) == self.n

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1 and self.is_connected()

    def _check_player(self, i: int) -> None:
        if not (isinstance(i, int) and 0 <= i < self.n):
            raise GraphError(f"player id {i!r} out of range [0, {self.n})")

    def fingerprint(self) -> str:
        return hashlib.sha256(dump_edge_list(self).encode()).hexdigest()


def degree(t: Topology, i: int) -> int:
    return t.degree(i)


def bfs_order(t: Topology, root: int = 0) -> list[int]:
    order = [root]
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in t.adjacency[u]:
            if v not in seen:
                seen.add(v)
                order.append(v)
                queue.append(v)
    return order


def bfs_levels(t: Topology, root: int = 0) -> list[list[int]]:
    """Players grouped by distance from ``root`` (reachable ones only)."""
    dist = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in t.adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    levels: list[list[int]] = [[] for _ in range(max(dist.values()) + 1)]
    for v, d in sorted(dist.items()):
        levels[d].append(v)
    return levels


# -- simple families ---------------------------------------------------------

def path_graph(n: int) -> Topology:
    return Topology.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(k: int) -> Topology:
    """K_{1,k}: center 0, leaves 1..k."""
    return Topology.from_edges(k + 1, [(0, i) for i in range(1, k + 1)])


def complete_graph(n: int) -> Topology:
    return Topology.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def empty_graph(n: int) -> Topology:
    return Topology(n, ())


# -- the monotone-degree tree family -----------------------------------------

@dataclass(frozen=True)
class TreeFamilyParams:
    """Rooted tree whose non-leaf degree is fixed per level.

    ``level_degrees[k]`` is the degree of every node on level ``k``; the
    tree has ``len(level_degrees) + 1`` levels, the last one made of leaves.
    ``depth`` counts levels and defaults accordingly.
    """

    level_degrees: tuple[int, ...]
    depth: int | None = None

    def __post_init__(self):
        degs = tuple(int(d) for d in self.level_degrees)
        object.__setattr__(self, "level_degrees", degs)
        if not degs:
            raise GraphError("level_degrees must not be empty")
        depth = len(degs) + 1 if self.depth is None else int(self.depth)
        object.__setattr__(self, "depth", depth)
        if depth < 2:
            raise GraphError("depth must be at least 2")
        if depth != len(degs) + 1:
            raise GraphError(
                f"depth {depth} needs exactly {depth - 1} level degrees, got {len(degs)}")
        if any(b <= a for a, b in zip(degs, degs[1:])):
            raise GraphError(f"level_degrees must be strictly increasing: {list(degs)}")
        if degs[0] < 1:
            raise GraphError("root degree must be at least 1")
        for k, d in enumerate(degs[1:], start=1):
            if d - 1 < 1:
                raise GraphError(f"level {k} degree {d} leaves no room for children")

    @property
    def in_counterexample_class(self) -> bool:
        """Whether the depth condition of the monotone-degree class holds."""
        return self.depth >= MIN_CLASS_DEPTH

    def level_sizes(self) -> list[int]:
        sizes = [1]
        for k, d in enumerate(self.level_degrees):
            sizes.append(sizes[-1] * (d if k == 0 else d - 1))
        return sizes


def gen_layered_tree(p: TreeFamilyParams) -> Topology:
    """Breadth-first construction; root is player 0."""
    if not p.in_counterexample_class:
        warnings.warn(
            f"depth {p.depth} < {MIN_CLASS_DEPTH}: outside the counterexample class",
            stacklevel=2)
    edges = []
    current = [0]
    next_id = 1
    for k, d in enumerate(p.level_degrees):
        children_per = d if k == 0 else d - 1
        nxt = []
        for parent in current:
            for _ in range(children_per):
                edges.append((parent, next_id))
                nxt.append(next_id)
                next_id += 1
        current = nxt
    return Topology.from_edges(next_id, edges)


def canonical_tree() -> Topology:
    return gen_layered_tree(TreeFamilyParams(CANONICAL_LEVEL_DEGREES, CANONICAL_DEPTH))


def random_tree(size: int, rng: random.Random) -> list[tuple[int, int]]:
    """Random recursive tree on local ids 0..size-1 (0 is the attachment root)."""
    return [(rng.randrange(v), v) for v in range(1, size)]


def extend_leaves(t: Topology, rng: random.Random, *, max_leaves: int = 6,
                  max_subtree: int = 6) -> Topology:
    """Hang random subtrees below a random subset of the current leaves.

    Existing ids are kept; new players get ids ``t.n, t.n+1, ...``.
    """
    leaves = [i for i in range(t.n) if t.degree(i) == 1 and i != 0]
    if not leaves:
        raise GraphError("topology has no non-root leaves to extend")
    chosen = sorted(rng.sample(leaves, rng.randint(1, min(max_leaves, len(leaves)))))
    edges = list(t.edges)
    n = t.n
    for leaf in chosen:
        size = rng.randint(1, max_subtree)
        local = {0: leaf}
        for v in range(size):
            local[v + 1] = n + v
        edges.append((leaf, n))
        for a, b in random_tree(size, rng):
            edges.append((local[a + 1], local[b + 1]))
        n += size
    return Topology.from_edges(n, edges)


# -- presets -----------------------------------------------------------------

def from_preset(name: str) -> Topology:
    """``goyal-canonical``, ``star:k``, ``path:n``, ``complete:n``, ``empty:n``,
    ``tree:1,3,4`` (level degrees)."""
    if name in ("goyal-canonical", "canonical"):
        return canonical_tree()
    kind, sep, arg = name.partition(":")
    if not sep:
        raise GraphError(f"unknown preset {name!r}")
    try:
        if kind == "tree":
            params = TreeFamilyParams(tuple(int(x) for x in arg.split(",")))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return gen_layered_tree(params)
        k = int(arg)
    except ValueError as exc:
        raise GraphError(f"bad preset argument in {name!r}") from exc
    builders = {"star": star_graph, "path": path_graph,
                "complete": complete_graph, "empty": empty_graph}
    if kind not in builders:
        raise GraphError(f"unknown preset {name!r}")
    return builders[kind](k)


# -- text formats ------------------------------------------------------------

_NODES_HINT = "# nodes:"


def load_edge_list(text: str) -> Topology:
    """Parse ``u v`` lines.  Blank lines and ``#`` comments are ignored, except
    that a ``# nodes: N`` comment sets the player count (for isolated players)."""
    edges = []
    n_hint = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith(_NODES_HINT):
            try:
                n_hint = int(line[len(_NODES_HINT):])
            except ValueError as exc:
                raise GraphError(f"line {lineno}: bad node count") from exc
            continue
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise GraphError(f"line {lineno}: expected 'u v' with nonnegative integers, got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    n = max((max(e) for e in edges), default=-1) + 1
    if n_hint is not None:
        if n_hint < n:
            raise GraphError(f"node count {n_hint} smaller than largest id {n - 1}")
        n = n_hint
    if n == 0:
        raise GraphError("edge list defines no players")
    return Topology.from_edges(n, edges)


def dump_edge_list(t: Topology) -> str:
    lines = [f"{_NODES_HINT} {t.n}"] if not t.edges or max(max(e) for e in t.edges) != t.n - 1 else []
    lines += [f"{u} {v}" for u, v in t.edges]
    return "\n".join(lines)


def to_dot(t: Topology, name: str = "g") -> str:
    out = [f"graph {name} {{"]
    for i in range(t.n):
        out.append(f'  {i} [label="{i}\\ndeg={t.degree(i)}"];')
    for u, v in t.edges:
        out.append(f"  {u} -- {v};")
    out.append("}")
    return "\n".join(out) + "\n"


def to_json_obj(t: Topology) -> dict:
    return {"n": t.n, "edges": [list(e) for e in t.edges]}


def from_json_obj(obj: dict) -> Topology:
    try:
        return Topology.from_edges(int(obj["n"]), obj["edges"])
    except (KeyError, TypeError) as exc:
        raise GraphError(f"bad topology JSON: {exc}") from exc


def loads_topology(text: str) -> Topology:
    """Accept either the JSON form or the edge-list form."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return from_json_obj(json.loads(text))
        except json.JSONDecodeError as exc:
            raise GraphError(f"bad topology JSON: {exc}") from exc
    return load_edge_list(text)
