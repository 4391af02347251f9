"""Partial-isomorphism algebra and dense-pair witnesses over the countable
ultrahomogeneous graphs, with machine-checkable certificates."""

from .graphs import GraphKind, GraphSession
from .partial_iso import PartialIso

__all__ = ["GraphKind", "GraphSession", "PartialIso"]
__version__ = "0.1.0"
