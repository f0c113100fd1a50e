"""Independent brute-force references used by the tests.

None of these share code paths with the package beyond the Graph container.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np


def all_pairs_hops(g):
    """Floyd–Warshall hop distances; None for unreachable."""
    inf = float("inf")
    d = [[0 if i == j else (1 if j in g.adj[i] else inf) for j in range(g.n)] for i in range(g.n)]
    for k in range(g.n):
        for i in range(g.n):
            for j in range(g.n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def shortest_paths(g, s, t, dist):
    """Every shortest s-t path as a tuple of nodes."""
    if dist[s][t] == float("inf"):
        return []
    paths = []

    def extend(path):
        u = path[-1]
        if u == t:
            paths.append(tuple(path))
            return
        for v in g.adj[u]:
            if dist[v][t] == dist[u][t] - 1:
                extend(path + [v])

    extend([s])
    return paths


def brute_betweenness(g):
    """Unordered-pair betweenness as exact fractions."""
    dist = all_pairs_hops(g)
    score = [Fraction(0)] * g.n
    for s, t in itertools.combinations(range(g.n), 2):
        paths = shortest_paths(g, s, t, dist)
        if not paths:
            continue
        for m in range(g.n):
            if m in (s, t):
                continue
            through = sum(1 for p in paths if m in p)
            score[m] += Fraction(through, len(paths))
    return score


def walk_sum(g, m, n):
    """Sum of d(i_n) over every walk m, i_1, ..., i_n (revisits allowed)."""
    deg = [len(a) for a in g.adj]
    total = 0

    def walk(u, left):
        nonlocal total
        if left == 0:
            total += deg[u]
            return
        for v in g.adj[u]:
            walk(v, left - 1)

    walk(m, n)
    return total


def slem_dense(w):
    """Largest eigenvalue modulus after removing the eigenvalue nearest 1."""
    eig = list(np.linalg.eigvals(np.asarray(w)))
    eig.pop(int(np.argmin([abs(e - 1) for e in eig])))
    return max((abs(e) for e in eig), default=0.0)
