"""Consensus weight design, synchronous and scheduled iteration, diagnostics.

Every weight matrix built here is row-stochastic, so one round
``x(t+1) = W x(t)`` replaces each state by a convex combination of its own
and its neighbors' previous states.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .classic import CentralityVector
from .graph import Graph

__all__ = [
    "Scheme",
    "WeightMatrix",
    "ConsensusTrace",
    "ActivationSchedule",
    "ConsensusError",
    "STOCHASTIC_TOL",
    "DC_EPSILON",
    "vicsek_weights",
    "metropolis_weights",
    "max_degree_weights",
    "identity_weights",
    "directed_consensus_weights",
    "build_weights",
    "schedule_from_weights",
    "run_consensus",
    "run_scheduled_consensus",
    "check_average_preservation",
    "convergence_rate",
    "disagreement",
]

STOCHASTIC_TOL = 1e-12
DC_EPSILON = 0.05


class ConsensusError(ValueError):
    pass


class Scheme(str, enum.Enum):
    VICSEK = "vicsek"
    METROPOLIS = "metropolis"
    MAX_DEGREE = "max_degree"
    DIRECTED = "directed"
    IDENTITY = "identity"


@dataclass(frozen=True)
class WeightMatrix:
    """Dense ``n x n`` consensus weights plus stochasticity flags."""

    entries: np.ndarray
    scheme: Scheme
    row_stochastic: bool = field(init=False)
    column_stochastic: bool = field(init=False)

    def __post_init__(self):
        w = np.asarray(self.entries, dtype=np.float64)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ConsensusError(f"weight matrix must be square, got shape {w.shape}")
        w.setflags(write=False)
        object.__setattr__(self, "entries", w)
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        rows = np.abs(w.sum(axis=1) - 1) <= STOCHASTIC_TOL
        cols = np.abs(w.sum(axis=0) - 1) <= STOCHASTIC_TOL
        nonneg = bool(np.all(w >= 0))
        object.__setattr__(self, "row_stochastic", bool(rows.all()) and nonneg)
        object.__setattr__(self, "column_stochastic", bool(cols.all()) and nonneg)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __getitem__(self, ij: tuple[int, int]) -> float:
        return float(self.entries[ij])

    def to_triplets(self) -> str:
        """Header line of JSON metadata, then ``i j w`` for every nonzero."""
        header = json.dumps(
            {
                "n": self.n,
                "scheme": self.scheme.value,
                "row_stochastic": self.row_stochastic,
                "column_stochastic": self.column_stochastic,
            },
            sort_keys=True,
        )
        lines = ["# " + header]
        for i, j in zip(*np.nonzero(self.entries)):
            lines.append(f"{i} {j} {float(self.entries[i, j])!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_triplets(cls, text: str) -> "WeightMatrix":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# "):
            raise ConsensusError("missing JSON header line")
        meta = json.loads(lines[0][2:])
        w = np.zeros((meta["n"], meta["n"]))
        for line in lines[1:]:
            if line.strip():
                i, j, v = line.split()
                w[int(i), int(j)] = float(v)
        return cls(w, meta["scheme"])


@dataclass
class ConsensusTrace:
    """States ``x(t)`` with their disagreement values.

    ``times`` holds the round index of each stored state (all rounds unless
    the run was thinned). ``criterion`` names what ``disagreements`` measures:
    ``"spread"`` is ``max x - min x``; ``"step"`` is ``max |x(t) - x(t-1)|``.
    """

    states: list[np.ndarray]
    disagreements: list[float]
    times: list[int]
    iterations: int
    converged: bool
    initial_average: float
    tol: float
    criterion: str = "spread"

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    @property
    def limit(self) -> float:
        return float(np.mean(self.final))

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        n = len(self.states[0]) if self.states else 0
        out.writerow(["t", *(f"node_{i}" for i in range(n)), "disagreement"])
        for t, x, d in zip(self.times, self.states, self.disagreements):
            out.writerow([t, *(repr(float(v)) for v in x), repr(float(d))])
        return buf.getvalue()


@dataclass(frozen=True)
class ActivationSchedule:
    """Per directed edge ``(i, j)`` the period in rounds between activations."""

    periods: Mapping[tuple[int, int], int]
    horizon: int

    def active(self, i: int, j: int, t: int) -> bool:
        period = self.periods.get((i, j))
        return period is not None and t % period == 0


def disagreement(x: np.ndarray) -> float:
    return float(np.max(x) - np.min(x)) if len(x) else 0.0


def _check_constructed(w: WeightMatrix) -> WeightMatrix:
    if not w.row_stochastic or np.any(w.entries > 1 + STOCHASTIC_TOL):
        raise ConsensusError(f"{w.scheme.value} weights are not row-stochastic")
    return w


def _fill_diagonal(w: np.ndarray) -> np.ndarray:
    np.fill_diagonal(w, 0.0)
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    return w


def vicsek_weights(g: Graph) -> WeightMatrix:
    """Uniform ``1 / (1 + d_i)`` over the closed neighborhood of ``i``.

    Row-stochastic, but column sums differ from one unless the graph is
    regular, so the limit is generally not the initial average.
    """
    w = np.zeros((g.n, g.n))
    for i in range(g.n):
        share = 1.0 / (1 + len(g.adj[i]))
        w[i, i] = share
        for j in g.adj[i]:
            w[i, j] = share
    return _check_constructed(WeightMatrix(w, Scheme.VICSEK))


def metropolis_weights(g: Graph) -> WeightMatrix:
    w = np.zeros((g.n, g.n))
    deg = g.degrees()
    for i, j in g.edges():
        w[i, j] = w[j, i] = 1.0 / (1 + max(deg[i], deg[j]))
    return _check_constructed(WeightMatrix(_fill_diagonal(w), Scheme.METROPOLIS))


def max_degree_weights(g: Graph) -> WeightMatrix:
    """``1/N`` on every edge, ``1 - d_i/N`` on the diagonal."""
    w = np.zeros((g.n, g.n))
    for i, j in g.edges():
        w[i, j] = w[j, i] = 1.0 / g.n
    return _check_constructed(WeightMatrix(_fill_diagonal(w), Scheme.MAX_DEGREE))


def identity_weights(g: Graph) -> WeightMatrix:
    return WeightMatrix(np.eye(g.n), Scheme.IDENTITY)


def directed_consensus_weights(
    g: Graph,
    scores: CentralityVector | Sequence[float],
    epsilon: float = DC_EPSILON,
    use_edge_weights: bool = False,
) -> WeightMatrix:
    """Score-driven asymmetric weights.

    Scores are rescaled to ``D = scores / max(scores)`` in ``(0, 1]``. Each
    edge gets the raw weight ``1 / (max(D_i, D_j) * (1 + D_i - D_j))``. Every
    row is then shrunk by ``min(1, (1 - epsilon) / row_sum)`` and the diagonal
    takes the remainder, so ``w_ii >= epsilon``.

    Direction: for an edge between a low-score node ``i`` and a high-score
    node ``j``, ``1 + D_i - D_j < 1`` so row ``i`` puts a large raw weight on
    ``j``. Low-score nodes listen to their high-score neighbors more than
    the other way round.

    With ``use_edge_weights`` each raw weight is also multiplied by the edge
    weight (e.g. a leak penalty) before row scaling.
    """
    d = np.asarray(getattr(scores, "scores", scores), dtype=np.float64)
    if d.shape != (g.n,):
        raise ConsensusError(f"expected {g.n} scores, got {d.shape}")
    if not np.all(d > 0) or not np.all(np.isfinite(d)):
        raise ConsensusError("directed consensus needs strictly positive finite scores")
    if not 0 < epsilon < 1:
        raise ConsensusError("epsilon must lie in (0, 1)")
    d = d / d.max()
    w = np.zeros((g.n, g.n))
    for i in range(g.n):
        for j in g.adj[i]:
            raw = 1.0 / (max(d[i], d[j]) * (1.0 + d[i] - d[j]))
            if use_edge_weights:
                raw *= g.weight(i, j)
            w[i, j] = raw
    row = w.sum(axis=1)
    with np.errstate(divide="ignore"):
        scale = np.where(row > 0, np.minimum(1.0, (1 - epsilon) / row), 1.0)
    w *= scale[:, None]
    return _check_constructed(WeightMatrix(_fill_diagonal(w), Scheme.DIRECTED))


def build_weights(
    g: Graph, scheme: Scheme | str, scores: CentralityVector | None = None
) -> WeightMatrix:
    """Dispatch on scheme name. ``directed`` requires ``scores``."""
    scheme = Scheme(scheme)
    if scheme is Scheme.DIRECTED:
        if scores is None:
            raise ConsensusError("directed scheme needs centrality scores")
        return directed_consensus_weights(g, scores)
    return {
        Scheme.VICSEK: vicsek_weights,
        Scheme.METROPOLIS: metropolis_weights,
        Scheme.MAX_DEGREE: max_degree_weights,
        Scheme.IDENTITY: identity_weights,
    }[scheme](g)


def schedule_from_weights(w: WeightMatrix, base_period: float = 1.0) -> ActivationSchedule:
    """Period ``max(1, round(base / w_ij))`` for every positive off-diagonal."""
    if base_period <= 0:
        raise ConsensusError("base_period must be positive")
    if np.any(w.entries < 0):
        raise ConsensusError("weights must be non-negative")
    periods = {}
    for i, j in zip(*np.nonzero(w.entries)):
        if i != j:
            periods[(int(i), int(j))] = max(1, round(base_period / w.entries[i, j]))
    horizon = math.lcm(*periods.values()) if periods else 1
    return ActivationSchedule(periods, horizon)


def _as_state(w: WeightMatrix, x0) -> np.ndarray:
    x = np.array(x0, dtype=np.float64)
    if x.shape != (w.n,):
        raise ConsensusError(f"state has shape {x.shape}, weights are {w.n}x{w.n}")
    if not np.all(np.isfinite(x)):
        raise ConsensusError("initial state contains NaN or inf")
    return x


def _iterate(step, x, tol, max_iter, criterion, thin) -> ConsensusTrace:
    if criterion not in ("spread", "step"):
        raise ConsensusError(f"unknown convergence criterion {criterion!r}")
    if thin < 1:
        raise ConsensusError("thin must be >= 1")
    first = disagreement(x) if criterion == "spread" else math.inf
    trace = ConsensusTrace([x], [first], [0], 0, first < tol, float(np.mean(x)), tol, criterion)
    if trace.converged:
        return trace
    for t in range(1, max_iter + 1):
        prev, x = x, step(t, x)
        if not np.all(np.isfinite(x)):
            raise ConsensusError(f"non-finite state at step {t}")
        d = disagreement(x) if criterion == "spread" else float(np.max(np.abs(x - prev)))
        done = d < tol
        if done or t % thin == 0 or t == max_iter:
            trace.states.append(x)
            trace.disagreements.append(d)
            trace.times.append(t)
        trace.iterations = t
        if done:
            trace.converged = True
            break
    return trace


def run_consensus(
    w: WeightMatrix,
    x0,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    criterion: str = "spread",
    thin: int = 1,
) -> ConsensusTrace:
    """Synchronous rounds ``x(t+1) = W x(t)`` until the criterion drops below ``tol``.

    ``thin=k`` keeps only every k-th state (plus the first and last).
    """
    x = _as_state(w, x0)
    m = w.entries
    return _iterate(lambda t, x: m @ x, x, tol, max_iter, criterion, thin)


def run_scheduled_consensus(
    g: Graph,
    w: WeightMatrix,
    sched: ActivationSchedule,
    x0,
    tol: float = 1e-8,
    max_iter: int = 10_000,
    criterion: str = "spread",
    thin: int = 1,
) -> ConsensusTrace:
    """Synchronous rounds where edge ``(i, j)`` fires only when ``t % T_ij == 0``.

    Rounds are numbered from 1. Weight on an inactive edge moves to the
    diagonal for that round, so every per-round matrix stays row-stochastic.
    """
    if g.n != w.n:
        raise ConsensusError("graph and weight matrix sizes differ")
    x = _as_state(w, x0)
    m = w.entries
    period = np.zeros((w.n, w.n), dtype=np.int64)
    for (i, j), p in sched.periods.items():
        period[i, j] = p
    scheduled = period > 0
    offdiag = (m != 0) & ~np.eye(w.n, dtype=bool)

    def step(t, x):
        active = scheduled & (t % np.where(scheduled, period, 1) == 0)
        if np.array_equal(active & offdiag, offdiag):
            return m @ x
        mt = np.where(active, m, 0.0)
        np.fill_diagonal(mt, np.diag(m) + np.where(offdiag & ~active, m, 0.0).sum(axis=1))
        return mt @ x

    return _iterate(step, x, tol, max_iter, criterion, thin)


def check_average_preservation(w: WeightMatrix) -> bool:
    """True iff every column sums to one (within ``STOCHASTIC_TOL``)."""
    return bool(np.all(np.abs(w.entries.sum(axis=0) - 1) <= STOCHASTIC_TOL))


def _stationary(m: np.ndarray) -> np.ndarray | None:
    n = m.shape[0]
    lhs = np.vstack([m.T - np.eye(n), np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    if np.max(np.abs(lhs @ pi - rhs)) > 1e-10 or np.any(pi <= 1e-14):
        return None
    return pi


def _symmetric_slem(s: np.ndarray, top: np.ndarray, tol: float, max_iter: int) -> float:
    # power iteration on M^2, M = S deflated against its unit eigenvector ``top``
    mdef = s - np.outer(top, top)
    m2 = mdef @ mdef
    rng = np.random.default_rng(0)
    v = rng.standard_normal(s.shape[0])
    v -= (v @ top) * top
    norm = np.linalg.norm(v)
    if norm == 0:
        return 0.0
    v /= norm
    rq = 0.0
    for _ in range(max_iter):
        u = m2 @ v
        new_rq = float(v @ u)
        norm = np.linalg.norm(u)
        if norm < 1e-300:
            return 0.0
        v = u / norm
        if abs(new_rq - rq) <= tol * max(new_rq, 1e-300):
            rq = new_rq
            break
        rq = new_rq
    return math.sqrt(max(rq, 0.0))


def convergence_rate(w: WeightMatrix, tol: float = 1e-15, max_iter: int = 200_000) -> float:
    """Second-largest eigenvalue modulus of ``W`` (1 excluded once).

    Reversible matrices (symmetric ones, and those like Vicsek weights that
    satisfy detailed balance) are symmetrized and the deflated operator is
    handled by power iteration. Anything else falls back to a dense
    eigensolve of the operator restricted to the disagreement subspace.
    """
    if not w.row_stochastic:
        raise ConsensusError("convergence_rate needs a row-stochastic matrix")
    m = w.entries
    n = w.n
    if n <= 1:
        return 0.0
    pi = _stationary(m)
    if pi is not None:
        flow = pi[:, None] * m
        if np.allclose(flow, flow.T, rtol=0, atol=1e-13):
            root = np.sqrt(pi)
            s = root[:, None] * m / root[None, :]
            s = (s + s.T) / 2
            return _symmetric_slem(s, root / np.linalg.norm(root), tol, max_iter)
    # orthonormal basis of the complement of the all-ones direction
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    basis = q[:, 1:]
    restricted = basis.T @ m @ basis
    return float(np.max(np.abs(np.linalg.eigvals(restricted))))
