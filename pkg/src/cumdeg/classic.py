"""Degree, betweenness, closeness and eigenvector centrality."""

from __future__ import annotations

import csv
import enum
import io
import json
import math
import warnings
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Mapping

import numpy as np

from .graph import Graph, is_connected, shortest_path_counts

__all__ = [
    "Measure",
    "CentralityVector",
    "CentralityError",
    "degree_centrality",
    "betweenness_centrality",
    "closeness_centrality",
    "eigenvector_centrality",
]


class CentralityError(ValueError):
    pass


class Measure(str, enum.Enum):
    DEGREE = "degree"
    BETWEENNESS = "betweenness"
    CLOSENESS = "closeness"
    EIGENVECTOR = "eigenvector"
    CD = "cd"
    CDN = "cdn"
    DCD = "dcd"
    D2CD = "d2cd"


@dataclass(frozen=True)
class CentralityVector:
    """Per-node scores plus the parameters that produced them."""

    measure: Measure
    scores: np.ndarray
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "scores", np.asarray(self.scores, dtype=np.float64))
        object.__setattr__(self, "measure", Measure(self.measure))

    def __len__(self) -> int:
        return len(self.scores)

    def __getitem__(self, m: int) -> float:
        return float(self.scores[m])

    def with_scores(self, scores, **params) -> "CentralityVector":
        return replace(self, scores=scores, params={**self.params, **params})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", "score"])
        for i, s in enumerate(self.scores):
            w.writerow([i, repr(float(s))])
        return buf.getvalue()

    def params_json(self) -> str:
        payload = {"measure": self.measure.value, "params": _jsonable(self.params)}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_csv(cls, text: str, measure: Measure, params: Mapping[str, Any] | None = None):
        rows = list(csv.DictReader(io.StringIO(text)))
        scores = np.empty(len(rows))
        for row in rows:
            scores[int(row["node"])] = float(row["score"])
        return cls(measure, scores, dict(params or {}))


def _jsonable(value):
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def degree_centrality(g: Graph) -> CentralityVector:
    """``deg(m) / (N - 1)`` for every node."""
    if g.n < 2:
        raise CentralityError("degree centrality needs at least two nodes")
    return CentralityVector(Measure.DEGREE, g.degrees() / (g.n - 1))


def _brandes(g: Graph, exact: bool):
    zero = Fraction(0) if exact else 0.0
    cb = [zero] * g.n
    for s in range(g.n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(g.n)]
        sigma = [0] * g.n
        dist = [-1] * g.n
        sigma[s], dist[s] = 1, 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in g.adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [zero] * g.n
        while stack:
            w = stack.pop()
            for v in preds[w]:
                if exact:
                    delta[v] += Fraction(sigma[v], sigma[w]) * (1 + delta[w])
                else:
                    delta[v] += sigma[v] / sigma[w] * (1 + delta[w])
            if w != s:
                cb[w] += delta[w]
    return cb


def betweenness_centrality(
    g: Graph, ordered: bool = False, exact: bool = True
) -> CentralityVector:
    """Unnormalized shortest-path betweenness (Brandes accumulation).

    Each unordered pair ``{s, t}`` contributes once; ``ordered=True`` counts
    ``(s, t)`` and ``(t, s)`` separately, doubling every score. With
    ``exact=True`` the dependencies are accumulated as fractions, so scores
    are exact up to the final float conversion; ``exact=False`` uses floats,
    which is faster on large graphs.
    """
    cb = _brandes(g, exact)
    # Brandes from every source counts each unordered pair twice
    if exact:
        scores = [float(c) if ordered else float(c / 2) for c in cb]
    else:
        scores = [c if ordered else c / 2 for c in cb]
    return CentralityVector(
        Measure.BETWEENNESS, scores, {"ordered": ordered, "exact": exact}
    )


def closeness_centrality(g: Graph, inverse: bool = False) -> CentralityVector:
    """Mean hop distance from each node to the rest of its component.

    This is a farness: smaller means more central. Isolated nodes get NaN
    (with a warning). ``inverse=True`` also stores ``1 / farness`` in
    ``params["inverse"]``.
    """
    scores = np.empty(g.n)
    isolated = []
    for m in range(g.n):
        dist, _ = shortest_path_counts(g, m)
        reach = [d for t, d in dist.items() if t != m and d != math.inf]
        if not reach:
            scores[m] = math.nan
            isolated.append(m)
        else:
            scores[m] = sum(reach) / len(reach)
    if isolated:
        warnings.warn(
            f"closeness undefined for isolated nodes {isolated}", RuntimeWarning, stacklevel=2
        )
    params: dict[str, Any] = {"farness": True}
    if inverse:
        with np.errstate(divide="ignore", invalid="ignore"):
            params["inverse"] = (1.0 / scores).tolist()
    return CentralityVector(Measure.CLOSENESS, scores, params)


def eigenvector_centrality(
    g: Graph, tol: float = 1e-12, max_iter: int = 100_000
) -> CentralityVector:
    """Perron eigenvector of the adjacency matrix by shifted power iteration.

    Iterates with ``A + I`` (same eigenvectors, no oscillation on bipartite
    graphs) from the all-ones vector. Stops once successive L2-normalized
    iterates differ by less than ``tol`` in max-norm and the residual
    ``|A x - lambda x|`` is within ``10 * tol``. The eigenvalue estimate
    (Rayleigh quotient) and iteration count go into ``params``.
    """
    if g.n == 0:
        raise CentralityError("empty graph")
    if not is_connected(g):
        raise CentralityError("eigenvector centrality requires a connected graph")
    a = g.adjacency_matrix()
    x = np.ones(g.n) / math.sqrt(g.n)
    lam = float(x @ a @ x)
    for it in range(1, max_iter + 1):
        y = a @ x + x
        y /= np.linalg.norm(y)
        diff = np.max(np.abs(y - x))
        x = y
        ax = a @ x
        lam = float(x @ ax)
        if diff < tol and np.max(np.abs(ax - lam * x)) <= 10 * tol:
            break
    else:
        raise CentralityError(f"power iteration did not converge in {max_iter} steps")
    x = np.clip(x, 0.0, None)
    x /= np.linalg.norm(x)
    return CentralityVector(
        Measure.EIGENVECTOR, x, {"eigenvalue": lam, "iterations": it, "tol": tol}
    )

