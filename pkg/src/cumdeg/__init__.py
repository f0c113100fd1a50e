"""Cumulative-degree centralities, consensus weight design and a gas-network demo."""

from .classic import (
    CentralityVector,
    Measure,
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    eigenvector_centrality,
)
from .cumulative import (
    CumulativeParams,
    Mode,
    cd_vector_all,
    cumulative_degree,
    cumulative_degree_n,
    discounted_dcd,
    distributed_cumulative_degree,
)
from .graph import Graph, gen_bucky, gen_random, gen_small_world, load_edge_list, save_edge_list

__all__ = [
    "CentralityVector",
    "CumulativeParams",
    "Graph",
    "Measure",
    "Mode",
    "betweenness_centrality",
    "cd_vector_all",
    "closeness_centrality",
    "cumulative_degree",
    "cumulative_degree_n",
    "degree_centrality",
    "discounted_dcd",
    "distributed_cumulative_degree",
    "eigenvector_centrality",
    "gen_bucky",
    "gen_random",
    "gen_small_world",
    "load_edge_list",
    "save_edge_list",
]
