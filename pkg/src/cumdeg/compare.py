"""Normalization, error metrics and CD^n-vs-eigenvector comparisons."""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .classic import CentralityError, CentralityVector, _jsonable, eigenvector_centrality
from .consensus import (
    Scheme,
    build_weights,
    check_average_preservation,
    convergence_rate,
    run_consensus,
)
from .cumulative import CumulativeParams, Mode, cd_vector_all, tree_layer_sums
from .graph import Graph, is_connected, save_edge_list

__all__ = [
    "Norm",
    "ConvergenceProfile",
    "normalize",
    "measure_error",
    "convergence_profile",
    "rank_correlation",
    "benchmark_consensus",
    "BenchmarkRow",
    "graph_hash",
]


class Norm(str, enum.Enum):
    L1 = "l1"
    L2 = "l2"
    MAX = "max"
    LINF = "linf"


def graph_hash(g: Graph) -> str:
    return hashlib.sha256(save_edge_list(g).encode()).hexdigest()[:16]


def normalize(v: CentralityVector, scheme: Norm | str = Norm.L2) -> CentralityVector:
    scheme = Norm(scheme)
    s = v.scores
    if scheme is Norm.L1:
        scale = np.sum(np.abs(s))
    elif scheme is Norm.L2:
        scale = np.linalg.norm(s)
    elif scheme is Norm.MAX:
        scale = np.max(np.abs(s))
    else:
        raise ValueError(f"unsupported normalization {scheme.value}")
    if scale == 0 or not np.isfinite(scale):
        raise CentralityError("cannot normalize an all-zero or non-finite vector")
    return v.with_scores(s / scale, normalization=scheme.value)


def _unit(s: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(s)
    if norm == 0:
        raise CentralityError("cannot compare an all-zero vector")
    return s / norm


def measure_error(
    a: CentralityVector | np.ndarray,
    b: CentralityVector | np.ndarray,
    norm: Norm | str = Norm.LINF,
) -> float:
    """Distance between two score vectors after L2 normalization.

    ``b`` is flipped if it points away from ``a``, so ``v`` and ``-v`` agree.
    """
    sa = np.asarray(getattr(a, "scores", a), dtype=np.float64)
    sb = np.asarray(getattr(b, "scores", b), dtype=np.float64)
    if sa.shape != sb.shape:
        raise CentralityError(f"node sets differ: {sa.shape} vs {sb.shape}")
    ua, ub = _unit(sa), _unit(sb)
    if ua @ ub < 0:
        ub = -ub
    diff = ua - ub
    norm = Norm(norm)
    if norm is Norm.LINF:
        return float(np.max(np.abs(diff)))
    if norm is Norm.L2:
        return float(np.linalg.norm(diff))
    raise ValueError(f"unsupported error norm {norm.value}")


@dataclass
class ConvergenceProfile:
    graph_id: str
    mode: Mode
    lazy: bool
    errors: dict[int, float]
    first_n_below: dict[float, int | None]
    metadata: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["n", "error"])
        for n in sorted(self.errors):
            out.writerow([n, repr(self.errors[n])])
        return buf.getvalue()

    def metadata_json(self) -> str:
        payload = {
            "graph_id": self.graph_id,
            "mode": self.mode.value,
            "lazy": self.lazy,
            "first_n_below": {str(k): v for k, v in self.first_n_below.items()},
            **self.metadata,
        }
        return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def _cdn_sequence(g: Graph, max_n: int, mode: Mode, lazy: bool):
    """Yield CD^n direction for n = 1..max_n.

    Walk mode runs the same recursion as ``cd_vector_all`` but rescales each
    iterate, which leaves the direction unchanged and avoids overflow for
    large ``n``.
    """
    if mode is Mode.WALK:
        a = g.adjacency_matrix()
        if lazy:
            a += np.eye(g.n)
        v = g.degrees().astype(np.float64)
        for _ in range(max_n):
            v = a @ v
            v = v / np.max(np.abs(v))
            yield v
    else:
        cum = [np.cumsum(tree_layer_sums(g, m, max_n)) for m in range(g.n)]
        for n in range(max_n):
            yield np.array([c[n] for c in cum])


def convergence_profile(
    g: Graph,
    max_n: int,
    mode: Mode | str = Mode.WALK,
    lazy: bool = True,
    norm: Norm | str = Norm.LINF,
    thresholds: Sequence[float] = (0.01,),
    graph_id: str | None = None,
    eig_tol: float = 1e-12,
) -> ConvergenceProfile:
    """Error between normalized CD^n and eigenvector centrality for n = 1..max_n."""
    mode = Mode(mode)
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if not is_connected(g):
        raise CentralityError("convergence profile needs a connected graph")
    if mode is Mode.TREE:
        lazy = False
    eig = eigenvector_centrality(g, tol=eig_tol)
    errors = {
        n: measure_error(v, eig, norm)
        for n, v in enumerate(_cdn_sequence(g, max_n, mode, lazy), start=1)
    }
    first = {
        t: next((n for n in sorted(errors) if errors[n] < t), None) for t in thresholds
    }
    return ConvergenceProfile(
        graph_id or graph_hash(g),
        mode,
        lazy,
        errors,
        first,
        {
            "graph_hash": graph_hash(g),
            "max_n": max_n,
            "norm": Norm(norm).value,
            "eigenvalue": eig.params["eigenvalue"],
        },
    )


def _average_ranks(s: np.ndarray) -> np.ndarray:
    order = np.argsort(s, kind="stable")
    ranks = np.empty(len(s))
    sorted_s = s[order]
    i = 0
    while i < len(s):
        j = i
        while j + 1 < len(s) and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def rank_correlation(a: CentralityVector | np.ndarray, b: CentralityVector | np.ndarray) -> float:
    """Spearman correlation with average ranks for ties.

    Returns NaN (and warns) when either input is constant.
    """
    sa = np.asarray(getattr(a, "scores", a), dtype=np.float64)
    sb = np.asarray(getattr(b, "scores", b), dtype=np.float64)
    if sa.shape != sb.shape:
        raise CentralityError(f"node sets differ: {sa.shape} vs {sb.shape}")
    if len(sa) < 2:
        raise CentralityError("rank correlation needs at least two nodes")
    ra, rb = _average_ranks(sa), _average_ranks(sb)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = math.sqrt(float(ra @ ra) * float(rb @ rb))
    if denom == 0:
        warnings.warn("rank correlation undefined for a constant vector", RuntimeWarning, stacklevel=2)
        return math.nan
    return float(np.clip((ra @ rb) / denom, -1.0, 1.0))


@dataclass(frozen=True)
class BenchmarkRow:
    scheme: str
    iterations: int
    converged: bool
    convergence_rate: float
    average_preserving: bool
    limit: float
    initial_average: float


BENCHMARK_FIELDS = [
    "scheme",
    "iterations",
    "converged",
    "convergence_rate",
    "average_preserving",
    "limit",
    "initial_average",
]


def benchmark_consensus(
    g: Graph,
    schemes: Sequence[Scheme | str],
    x0,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    dc_params: CumulativeParams | None = None,
) -> list[BenchmarkRow]:
    """Run each weight scheme from the same start and tabulate the outcome.

    The directed scheme takes its scores from lazy walk-mode CD^3 unless
    ``dc_params`` says otherwise.
    """
    if not is_connected(g):
        raise CentralityError("benchmark needs a connected graph")
    dc_params = dc_params or CumulativeParams(3, Mode.WALK, lazy=True)
    rows = []
    for scheme in schemes:
        scheme = Scheme(scheme)
        scores = cd_vector_all(g, dc_params) if scheme is Scheme.DIRECTED else None
        w = build_weights(g, scheme, scores)
        trace = run_consensus(w, x0, tol, max_iter, thin=max_iter)
        rows.append(
            BenchmarkRow(
                scheme.value,
                trace.iterations,
                trace.converged,
                convergence_rate(w),
                check_average_preservation(w),
                trace.limit,
                trace.initial_average,
            )
        )
    return rows


def benchmark_csv(rows: Sequence[BenchmarkRow]) -> str:
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(BENCHMARK_FIELDS)
    for r in rows:
        out.writerow(
            [
                r.scheme,
                r.iterations,
                r.converged,
                repr(r.convergence_rate),
                r.average_preserving,
                repr(r.limit),
                repr(r.initial_average),
            ]
        )
    return buf.getvalue()
