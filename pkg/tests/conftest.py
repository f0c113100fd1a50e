import itertools

import pytest
from hypothesis import strategies as st

from cumdeg import graph as G


def small_graphs(max_nodes=8):
    """Hypothesis strategy: arbitrary simple graphs on up to ``max_nodes`` nodes."""

    @st.composite
    def build(draw):
        n = draw(st.integers(1, max_nodes))
        pairs = list(itertools.combinations(range(n), 2))
        mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        return G.Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])

    return build()


def connected_random(n, p, seed):
    """First connected G(n, p) at or after ``seed``."""
    while True:
        g = G.gen_random(n, p, seed)
        if G.is_connected(g):
            return g
        seed += 1000


def corpus():
    """Named connected graphs shared by the consensus and acceptance tests."""
    graphs = {
        "P3": G.gen_path(3),
        "P4": G.gen_path(4),
        "K3": G.gen_complete(3),
        "K5": G.gen_complete(5),
        "S4": G.gen_star(4),
        "C4": G.gen_cycle(4),
        "C7": G.gen_cycle(7),
        "bucky": G.gen_bucky(),
        "cliques": G.gen_star_of_cliques(4, 4),
        "ws20": G.gen_small_world(20, 4, 0.2, 3),
        "er30": G.gen_random(30, 0.15, 42),
    }
    for seed in range(5):
        graphs[f"er12-{seed}"] = connected_random(12, 0.3, seed)
    return graphs


@pytest.fixture(scope="session")
def graph_corpus():
    return corpus()


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))
    elif report.when == "setup" and report.outcome != "passed" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        mark = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{mark}  {name}")
