"""Cumulative-degree centralities: CD, CD^n, DCD and discounted DCD.

Two readings of the layered sums are supported:

``Walk``
    Nested neighbor sums taken literally, revisits included. ``CD^n = A^n d``
    where ``d`` is the degree vector; with ``lazy`` the matrix is ``A + I``.
    This is power iteration seeded with ``d``, so the normalized scores tend
    to eigenvector centrality as ``n`` grows.
``Tree``
    Sum of degrees over the canonical BFS spanning tree, each reachable node
    counted once at its own depth.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .classic import CentralityVector, Measure
from .graph import Graph, GraphError, bfs_layers

__all__ = [
    "Mode",
    "CumulativeParams",
    "cumulative_degree",
    "cumulative_degree_n",
    "distributed_cumulative_degree",
    "discounted_dcd",
    "cd_vector_all",
    "walk_layers",
    "tree_layer_sums",
]


class Mode(str, enum.Enum):
    WALK = "walk"
    TREE = "tree"


@dataclass(frozen=True)
class CumulativeParams:
    layer_n: int = 1
    mode: Mode = Mode.WALK
    lazy: bool = False
    discounts: tuple[float, ...] = field(default=())
    include_self: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "discounts", tuple(float(a) for a in self.discounts))
        if self.layer_n < 0:
            raise GraphError("layer_n must be non-negative")
        if any(a < 0 for a in self.discounts):
            raise GraphError("discounts must be non-negative")
        if self.lazy and self.mode is Mode.TREE:
            raise GraphError("lazy only applies to walk mode")

    def as_dict(self) -> dict:
        return {
            "layer_n": self.layer_n,
            "mode": self.mode.value,
            "lazy": self.lazy,
            "discounts": list(self.discounts),
            "include_self": self.include_self,
        }


def _check_node(g: Graph, m: int) -> None:
    if not 0 <= m < g.n:
        raise GraphError(f"unknown node {m!r}")


def walk_layers(g: Graph, n: int, lazy: bool = False) -> list[np.ndarray]:
    """``[A d, A^2 d, ..., A^n d]`` by repeated matrix-vector products.

    Integer-valued float64 throughout, exact while entries stay below 2**53.
    """
    a = g.adjacency_matrix()
    if lazy:
        a += np.eye(g.n)
    v = g.degrees().astype(np.float64)
    out = []
    for _ in range(n):
        v = a @ v
        out.append(v)
    return out


def tree_layer_sums(g: Graph, m: int, n: int | None) -> list[float]:
    """Degree sum of BFS depth ``k`` for ``k = 1..n`` (``None``: full tree)."""
    deg = g.degrees()
    tree = bfs_layers(g, m, n)
    sums = [float(sum(deg[v] for v in layer)) for layer in tree.layers[1:]]
    if n is not None:
        sums += [0.0] * (n - len(sums))
    return sums


def cumulative_degree(g: Graph, m: int) -> float:
    """Sum of the degrees of ``m``'s neighbors."""
    _check_node(g, m)
    return float(sum(len(g.adj[i]) for i in g.adj[m]))


def _require_layer(params: CumulativeParams) -> None:
    if params.layer_n < 1:
        raise GraphError("layer_n must be >= 1")


def cumulative_degree_n(g: Graph, m: int, params: CumulativeParams) -> float:
    _check_node(g, m)
    _require_layer(params)
    return float(cd_vector_all(g, params).scores[m])


def distributed_cumulative_degree(
    g: Graph, m: int, mode: Mode = Mode.TREE, include_self: bool = False
) -> float:
    """Degree sum over every node of ``m``'s BFS spanning tree.

    Only defined for the tree reading; the walk sum over an unbounded number
    of layers diverges on any graph with an edge.
    """
    _check_node(g, m)
    if Mode(mode) is Mode.WALK:
        raise GraphError(
            "DCD is unbounded in walk mode (A^n d grows without limit); "
            "use cumulative_degree_n with a finite layer count"
        )
    total = sum(tree_layer_sums(g, m, None))
    if include_self:
        total += len(g.adj[m])
    return float(total)


def discounted_dcd(g: Graph, m: int, params: CumulativeParams) -> float:
    """``sum_k alpha[k-1] * L_k`` for layers ``k = 1..n``.

    ``L_k`` is the depth-``k`` degree sum in tree mode, or ``(A^k d)_m`` in
    walk mode. The root degree is added undiscounted when ``include_self``.
    """
    _check_node(g, m)
    return float(_d2cd_all(g, params)[m])


def _d2cd_all(g: Graph, params: CumulativeParams) -> np.ndarray:
    if not params.discounts:
        raise GraphError("discounted DCD needs at least one discount coefficient")
    if len(params.discounts) != params.layer_n:
        raise GraphError(
            f"got {len(params.discounts)} discounts for layer_n={params.layer_n}"
        )
    alpha = np.array(params.discounts)
    if params.mode is Mode.WALK:
        layers = np.array(walk_layers(g, params.layer_n, params.lazy))
        out = alpha @ layers
    else:
        out = np.array(
            [alpha @ np.array(tree_layer_sums(g, m, params.layer_n)) for m in range(g.n)]
        )
    if params.include_self:
        out = out + g.degrees()
    return out


def cd_vector_all(
    g: Graph, params: CumulativeParams, measure: Measure = Measure.CDN
) -> CentralityVector:
    """Scores for every node at once.

    ``measure`` picks the family member: ``CD`` (one layer), ``CDN``,
    ``DCD`` (full tree) or ``D2CD``. Walk mode follows the recursion
    ``CD^n = A CD^(n-1)`` and never forms a matrix power.
    """
    measure = Measure(measure)
    if measure is Measure.CD:
        scores = np.array([cumulative_degree(g, m) for m in range(g.n)])
    elif measure is Measure.CDN:
        _require_layer(params)
        if params.mode is Mode.WALK:
            scores = walk_layers(g, params.layer_n, params.lazy)[-1]
        else:
            scores = np.array(
                [sum(tree_layer_sums(g, m, params.layer_n)) for m in range(g.n)]
            )
    elif measure is Measure.DCD:
        scores = np.array(
            [
                distributed_cumulative_degree(g, m, params.mode, params.include_self)
                for m in range(g.n)
            ]
        )
    elif measure is Measure.D2CD:
        _require_layer(params)
        scores = _d2cd_all(g, params)
    else:
        raise GraphError(f"{measure.value} is not a cumulative-degree measure")
    return CentralityVector(measure, scores, params.as_dict())
