"""Regular multigraphs, graph products and non-linear spectral gaps."""

from .errors import NlsgError
from .graph_ops import cesaro, double, edge_complete, power, replacement, tensor, zigzag
from .multigraph import Multigraph, StochasticMatrix, from_edge_list, load, random_regular
from .poincare import gamma_exact, gamma_plus_exact, gamma_plus_search
from .spectral import spectrum

__version__ = "0.1.0"

__all__ = [
    "Multigraph", "NlsgError", "StochasticMatrix", "cesaro", "double", "edge_complete", "from_edge_list",
    "gamma_exact", "gamma_plus_exact", "gamma_plus_search", "load", "power", "random_regular", "replacement",
    "spectrum", "tensor", "zigzag",
]
