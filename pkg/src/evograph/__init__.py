"""evograph: evolutionary seed-set optimization on graphs with image-encoded
solutions and vision-chat operators, runnable fully offline against a
deterministic mock backend."""

__version__ = "0.1.0"

from evograph.graph import Graph, load_edge_list, betweenness, largest_component, induced_subgraph
from evograph.community import CommunityStructure, detect_fastgreedy, modularity
from evograph.sparsify import SparsifiedGraph, sparsify, sparsify_if_large
from evograph.fitness import edv, ic_simulate, dismantling_fitness
from evograph.engine import EngineConfig, evolve

__all__ = [
    "Graph",
    "load_edge_list",
    "betweenness",
    "largest_component",
    "induced_subgraph",
    "CommunityStructure",
    "detect_fastgreedy",
    "modularity",
    "SparsifiedGraph",
    "sparsify",
    "sparsify_if_large",
    "edv",
    "ic_simulate",
    "dismantling_fitness",
    "EngineConfig",
    "evolve",
]
