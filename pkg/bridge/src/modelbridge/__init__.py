"""Out-of-process graph classifier/embedder server (line-delimited JSON)."""

from .graphio import Graph, GraphFormatError, parse, serialize
from .models import (HashedStructureEmbedder, ModelError, MotifClassifier,
                     SameLabelPairClassifier, load_model)
from .server import handle, main, serve

__all__ = [
    "Graph", "GraphFormatError", "parse", "serialize",
    "HashedStructureEmbedder", "ModelError", "MotifClassifier",
    "SameLabelPairClassifier", "load_model",
    "handle", "main", "serve",
]
