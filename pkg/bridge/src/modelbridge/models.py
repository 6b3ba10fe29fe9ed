"""Deterministic reference models served over the bridge protocol.

A model spec is a dict with a ``classifier`` entry and an ``embedder`` entry;
it comes from a JSON file (path in the ``MODELBRIDGE_MODEL`` environment
variable or the --model flag) or defaults to the built-in motif classifier
with a 64-dimensional hashed structural embedder.  Inference is pure: no
randomness, no state mutated between requests.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
import struct

from .graphio import Graph, GraphFormatError, adjacency, parse

DEFAULT_DIM = 64
DEFAULT_MOTIF = "3 2\nN\nO\nO\n0 1\n0 2\n"


class ModelError(Exception):
    pass


def _subgraph_present(g: Graph, motif: Graph) -> bool:
    """Brute-force labeled subgraph isomorphism; motifs are tiny."""
    if motif.n_nodes > g.n_nodes:
        return False
    slots = [[v for v in range(g.n_nodes) if g.labels[v] == lab]
             for lab in motif.labels]
    for combo in itertools.product(*slots):
        if len(set(combo)) != motif.n_nodes:
            continue
        if all(tuple(sorted((combo[a], combo[b]))) in g.edges
               for a, b in motif.edges):
            return True
    return False


class MotifClassifier:
    """Rejects (p=0) any graph containing the forbidden motif."""

    def __init__(self, motif_text: str = DEFAULT_MOTIF):
        self.motif = parse(motif_text)

    def predict(self, g: Graph) -> float:
        return 0.0 if _subgraph_present(g, self.motif) else 1.0


class SameLabelPairClassifier:
    """Accepts (p=1) graphs with two nodes sharing a non-ignored label."""

    def __init__(self, ignore: tuple[str, ...] = ("_",)):
        self.ignore = frozenset(ignore)

    def predict(self, g: Graph) -> float:
        seen = set()
        for lab in g.labels:
            if lab in self.ignore:
                continue
            if lab in seen:
                return 1.0
            seen.add(lab)
        return 0.0


class HashedStructureEmbedder:
    """Deterministic graph embedding: iterated neighborhood-label hashing
    scattered into sign buckets, scaled by node count."""

    def __init__(self, dim: int = DEFAULT_DIM, rounds: int = 3):
        if dim < 1:
            raise ModelError(f"embedding dimension {dim} < 1")
        self.dim = dim
        self.rounds = rounds

    def embed(self, g: Graph) -> list[float]:
        vec = [0.0] * self.dim
        if g.n_nodes == 0:
            return vec
        adj = adjacency(g)
        colors = list(g.labels)
        scale = 1.0 / g.n_nodes
        for _ in range(self.rounds + 1):
            for c in colors:
                h = hashlib.md5(c.encode()).digest()
                bucket, sign = struct.unpack("<QQ", h)
                vec[bucket % self.dim] += scale * (1.0 if sign & 1 else -1.0)
            colors = [
                colors[v] + "|" + ",".join(sorted(colors[w] for w in adj[v]))
                for v in range(g.n_nodes)
            ]
        return vec


_CLASSIFIERS = {
    "motif": MotifClassifier,
    "same_label_pair": SameLabelPairClassifier,
}


def load_model(spec_source: str | None):
    """Build (classifier, embedder, identifier) from a spec file or default."""
    if spec_source is None:
        spec_source = os.environ.get("MODELBRIDGE_MODEL")
    if spec_source is None:
        spec = {}
    else:
        try:
            with open(spec_source) as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ModelError(f"cannot load model spec {spec_source!r}: {exc}")
    cspec = dict(spec.get("classifier", {"name": "motif"}))
    name = cspec.pop("name", "motif")
    if name not in _CLASSIFIERS:
        raise ModelError(f"unknown classifier {name!r}")
    try:
        classifier = _CLASSIFIERS[name](**cspec)
    except (TypeError, GraphFormatError) as exc:
        raise ModelError(f"bad classifier params: {exc}")
    espec = dict(spec.get("embedder", {}))
    embedder = HashedStructureEmbedder(**espec)
    ident = f"{name}/hashed-structure-d{embedder.dim}"
    return classifier, embedder, ident

