"""Covariance-based graph embeddings: softmax clustering, sphere updates, spectral checks."""

from ._core import (
    ConvergenceError,
    Graph,
    InputError,
    InvariantError,
    __version__,
    bound_report,
    cafe,
    eigs,
    multilayer,
    reduce,
    sphere,
)

__all__ = [
    "ConvergenceError",
    "Graph",
    "InputError",
    "InvariantError",
    "__version__",
    "bound_report",
    "cafe",
    "eigs",
    "multilayer",
    "reduce",
    "sphere",
]
