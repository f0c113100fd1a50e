"""Undirected simple graphs, BFS primitives, generators and edge-list I/O."""

from __future__ import annotations

import io
import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from typing import IO, Iterable, Mapping

import numpy as np

__all__ = [
    "Graph",
    "BfsLayers",
    "GraphError",
    "INF",
    "neighbors",
    "degree",
    "bfs_layers",
    "shortest_path_counts",
    "is_connected",
    "connected_components",
    "load_edge_list",
    "save_edge_list",
    "gen_bucky",
    "gen_random",
    "gen_small_world",
    "gen_path",
    "gen_cycle",
    "gen_complete",
    "gen_star",
    "gen_star_of_cliques",
]

#: Distance sentinel for unreachable nodes.
INF = math.inf


class GraphError(ValueError):
    """Invalid graph construction, lookup or input file."""


def _edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1``.

    ``weights`` is ``None`` for an unweighted graph, otherwise a mapping from
    ``(u, v)`` with ``u < v`` to a positive weight. Missing edges default to 1.
    """

    n: int
    adj: tuple[frozenset[int], ...]
    weights: Mapping[tuple[int, int], float] | None = None
    labels: tuple[str, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 0 or len(self.adj) != self.n:
            raise GraphError("adjacency length must equal node count")
        for i, nbrs in enumerate(self.adj):
            if i in nbrs:
                raise GraphError(f"self-loop at node {i}")
            for j in nbrs:
                if not 0 <= j < self.n:
                    raise GraphError(f"neighbor {j} of node {i} out of range")
                if i not in self.adj[j]:
                    raise GraphError(f"asymmetric adjacency between {i} and {j}")
        if self.weights is not None:
            for (u, v), w in self.weights.items():
                if u >= v or v not in self.adj[u]:
                    raise GraphError(f"weight given for non-edge ({u}, {v})")
                if not w > 0:
                    raise GraphError(f"edge ({u}, {v}) has non-positive weight {w}")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Mapping[tuple[int, int], float] | None = None,
        labels: tuple[str, ...] | None = None,
    ) -> "Graph":
        sets: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            sets[u].add(v)
            sets[v].add(u)
        if weights is not None:
            weights = {_edge_key(u, v): float(w) for (u, v), w in weights.items()}
        return cls(n, tuple(frozenset(s) for s in sets), weights, labels)

    @property
    def node_count(self) -> int:
        return self.n

    def edges(self) -> list[tuple[int, int]]:
        """Sorted edge list with ``u < v``."""
        return sorted((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.adj) // 2

    def weight(self, u: int, v: int) -> float:
        if v not in self.adj[u]:
            raise GraphError(f"({u}, {v}) is not an edge")
        if self.weights is None:
            return 1.0
        return self.weights.get(_edge_key(u, v), 1.0)

    def degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self.adj], dtype=np.int64)

    def adjacency_matrix(self, dtype=np.float64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for u, nbrs in enumerate(self.adj):
            for v in nbrs:
                a[u, v] = 1
        return a

    def sorted_neighbors(self, m: int) -> list[int]:
        return sorted(self.adj[m])

    def without_edges(self, removed: Iterable[tuple[int, int]]) -> "Graph":
        """Copy of the graph with the given edges dropped (weights kept)."""
        drop = {_edge_key(u, v) for u, v in removed}
        keep = [e for e in self.edges() if e not in drop]
        weights = None
        if self.weights is not None:
            weights = {e: w for e, w in self.weights.items() if e not in drop}
        return Graph.from_edges(self.n, keep, weights, self.labels)

    def with_weights(self, weights: Mapping[tuple[int, int], float]) -> "Graph":
        return Graph.from_edges(self.n, self.edges(), weights, self.labels)

    def subgraph(self, nodes: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; also returns the old ids."""
        keep = sorted(set(nodes))
        index = {old: new for new, old in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges() if u in index and v in index]
        weights = None
        if self.weights is not None:
            weights = {
                (index[u], index[v]): w
                for (u, v), w in self.weights.items()
                if u in index and v in index
            }
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in keep)
        return Graph.from_edges(len(keep), edges, weights, labels), keep


@dataclass(frozen=True)
class BfsLayers:
    root: int
    layers: tuple[frozenset[int], ...]
    parent: Mapping[int, int]

    @property
    def depth(self) -> int:
        return len(self.layers) - 1

    def nodes(self) -> set[int]:
        return set().union(*self.layers)


def _check_node(g: Graph, m: int) -> None:
    if not isinstance(m, (int, np.integer)) or not 0 <= m < g.n:
        raise GraphError(f"unknown node {m!r}")


def neighbors(g: Graph, m: int) -> frozenset[int]:
    _check_node(g, m)
    return g.adj[m]


def degree(g: Graph, m: int) -> int:
    _check_node(g, m)
    return len(g.adj[m])


def bfs_layers(g: Graph, root: int, max_depth: int | None = None) -> BfsLayers:
    """Breadth-first spanning tree of ``root``'s component.

    Neighbors are expanded in ascending id order, so the tree is canonical.
    ``max_depth=None`` means unbounded.
    """
    _check_node(g, root)
    if max_depth is not None and max_depth < 0:
        raise GraphError("max_depth must be non-negative")
    parent: dict[int, int] = {}
    seen = {root}
    layers = [frozenset([root])]
    frontier = [root]
    while frontier and (max_depth is None or len(layers) <= max_depth):
        nxt: list[int] = []
        for u in frontier:
            for v in g.sorted_neighbors(u):
                if v not in seen:
                    seen.add(v)
                    parent[v] = u
                    nxt.append(v)
        if not nxt:
            break
        layers.append(frozenset(nxt))
        frontier = sorted(nxt)
    return BfsLayers(root, tuple(layers), parent)


def shortest_path_counts(g: Graph, s: int) -> tuple[dict[int, float], dict[int, int]]:
    """Hop distances and shortest-path counts from ``s`` to every node.

    Unreachable nodes get distance ``INF`` and count 0.
    """
    _check_node(g, s)
    dist: dict[int, float] = {v: INF for v in range(g.n)}
    sigma = {v: 0 for v in range(g.n)}
    dist[s] = 0
    sigma[s] = 1
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in g.adj[u]:
            if dist[v] == INF:
                dist[v] = dist[u] + 1
                queue.append(v)
            if dist[v] == dist[u] + 1:
                sigma[v] += sigma[u]
    return dist, sigma


def connected_components(g: Graph) -> list[list[int]]:
    """Components as sorted node lists, ordered by smallest member."""
    seen: set[int] = set()
    comps = []
    for s in range(g.n):
        if s in seen:
            continue
        comp = bfs_layers(g, s).nodes()
        seen |= comp
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    return len(bfs_layers(g, 0).nodes()) == g.n


# ---------------------------------------------------------------------------
# edge-list I/O


def load_edge_list(source: IO[bytes] | IO[str] | bytes | str) -> Graph:
    """Parse an edge-list file.

    Each non-comment line is ``u v`` or ``u v w``; a line with a single token
    declares a node without adding an edge. Tokens are compacted to dense ids
    in first-seen order. Duplicate edges collapse (the last weight wins).
    """
    if isinstance(source, bytes):
        text = source.decode()
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode() if isinstance(raw, bytes) else raw

    index: dict[str, int] = {}
    edges: dict[tuple[int, int], float | None] = {}

    def node(tok: str) -> int:
        if tok not in index:
            index[tok] = len(index)
        return index[tok]

    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) == 1:
            node(parts[0])
            continue
        if len(parts) > 3:
            raise GraphError(f"line {lineno}: expected 'u v [w]', got {line!r}")
        if parts[0] == parts[1]:
            raise GraphError(f"line {lineno}: self-loop on {parts[0]!r}")
        w = None
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphError(f"line {lineno}: bad weight {parts[2]!r}") from None
            if not math.isfinite(w) or w < 0:
                raise GraphError(f"line {lineno}: negative or non-finite weight {parts[2]}")
            if w == 0:
                raise GraphError(f"line {lineno}: zero weight")
        u, v = node(parts[0]), node(parts[1])
        edges[_edge_key(u, v)] = w

    weights = None
    if any(w is not None for w in edges.values()):
        weights = {e: (1.0 if w is None else w) for e, w in edges.items()}
    labels = tuple(index)
    return Graph.from_edges(len(index), edges, weights, labels)


def save_edge_list(g: Graph, dest: IO[str] | None = None) -> str:
    """Serialize ``g`` as sorted ``u v [w]`` lines with ``u < v``.

    When the sorted edges alone would not reproduce the node numbering on
    reload (isolated nodes, or ids first seen out of order) a block of
    single-id declaration lines is written first.
    """
    edges = g.edges()
    first_seen: list[int] = []
    seen: set[int] = set()
    for u, v in edges:
        for x in (u, v):
            if x not in seen:
                seen.add(x)
                first_seen.append(x)
    lines = []
    if first_seen != list(range(g.n)):
        lines.extend(str(i) for i in range(g.n))
    for u, v in edges:
        if g.weights is None:
            lines.append(f"{u} {v}")
        else:
            lines.append(f"{u} {v} {g.weight(u, v)!r}")
    text = "".join(line + "\n" for line in lines)
    if dest is not None:
        dest.write(text)
    return text


# ---------------------------------------------------------------------------
# generators


def gen_path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def gen_cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 nodes")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def gen_complete(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def gen_star(n: int) -> Graph:
    """Star with hub 0 and ``n - 1`` leaves."""
    return Graph.from_edges(n, [(0, i) for i in range(1, n)])


def gen_star_of_cliques(arms: int, clique_size: int) -> Graph:
    """Hub node 0 joined to one member of each of ``arms`` cliques."""
    if arms < 1 or clique_size < 1:
        raise GraphError("arms and clique_size must be positive")
    edges = []
    for a in range(arms):
        base = 1 + a * clique_size
        members = range(base, base + clique_size)
        edges.extend(itertools.combinations(members, 2))
        edges.append((0, base))
    return Graph.from_edges(1 + arms * clique_size, edges)


def _icosahedron() -> list[set[int]]:
    phi = (1 + math.sqrt(5)) / 2
    pts = []
    for a in (-1.0, 1.0):
        for b in (-phi, phi):
            pts.extend([(0.0, a, b), (a, b, 0.0), (b, 0.0, a)])
    pts.sort()
    nbrs: list[set[int]] = [set() for _ in pts]
    for i, j in itertools.combinations(range(len(pts)), 2):
        if abs(math.dist(pts[i], pts[j]) - 2.0) < 1e-9:
            nbrs[i].add(j)
            nbrs[j].add(i)
    return nbrs


def gen_bucky() -> Graph:
    """Truncated icosahedron (buckminsterfullerene skeleton): 60 nodes, 90 edges.

    Each vertex corresponds to a directed edge ``(u, v)`` of the icosahedron,
    i.e. the cut point on edge ``uv`` nearest ``u``.
    """
    ico = _icosahedron()
    darts = sorted((u, v) for u in range(len(ico)) for v in ico[u])
    index = {d: i for i, d in enumerate(darts)}
    edges = []
    for u, v in darts:
        edges.append((index[(u, v)], index[(v, u)]))
        # pentagon around u: consecutive darts share a triangle face
        for w in ico[u] & ico[v]:
            edges.append((index[(u, v)], index[(u, w)]))
    return Graph.from_edges(len(darts), edges)


def gen_random(n: int, p: float, seed: int | None = None) -> Graph:
    """Erdős–Rényi G(n, p), reproducible for a fixed seed."""
    if n < 1:
        raise GraphError("n must be >= 1")
    if not 0 <= p <= 1:
        raise GraphError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return Graph.from_edges(n, edges)


def gen_small_world(n: int, k: int, beta: float, seed: int | None = None) -> Graph:
    """Watts–Strogatz ring lattice with each edge rewired with probability beta."""
    if n < 1:
        raise GraphError("n must be >= 1")
    if k < 0 or k % 2 or k >= n:
        raise GraphError("k must be even, non-negative and < n")
    if not 0 <= beta <= 1:
        raise GraphError("beta must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    adj: list[set[int]] = [set() for _ in range(n)]
    for i in range(n):
        for j in range(1, k // 2 + 1):
            adj[i].add((i + j) % n)
            adj[(i + j) % n].add(i)
    for j in range(1, k // 2 + 1):
        for i in range(n):
            v = (i + j) % n
            if v not in adj[i] or rng.random() >= beta:
                continue
            choices = [w for w in range(n) if w != i and w not in adj[i]]
            if not choices:
                continue
            w = choices[rng.integers(len(choices))]
            adj[i].discard(v)
            adj[v].discard(i)
            adj[i].add(w)
            adj[w].add(i)
    edges = [(u, v) for u in range(n) for v in adj[u] if u < v]
    return Graph.from_edges(n, edges)
