"""Spring-electrical graph embedding.

Nodes move in an n-dimensional space under spring attraction along edges
and biased inverse-distance repulsion between all pairs, until the total
squared force settles.
"""
from .forces import ForceParams
from .graph import Graph, LabelMap, grid_graph, parse_edge_list, parse_labels
from .kernels import BACKEND
from .trainer import TrainConfig, TrainState, train

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ForceParams",
    "Graph",
    "LabelMap",
    "TrainConfig",
    "TrainState",
    "grid_graph",
    "parse_edge_list",
    "parse_labels",
    "train",
]
