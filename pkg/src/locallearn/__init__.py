"""Online local learning: log-det FTRL and planted-subgraph distinguishers."""

__version__ = "0.1.0"

from .polytope import ProblemDims, PseudoMomentMatrix  # noqa: F401
