"""Graph embeddings and recourse vectors.

Any object with an ``embed(graph) -> np.ndarray`` method and a ``dim``
attribute works as an embedder.  The built-in one hashes Weisfeiler-Lehman
subtree patterns into a fixed number of signed buckets and scales by graph
size, so a single edit moves a large graph less than a small one, in the
spirit of a normalized edit-distance proxy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import wl
from .graphs import GraphError, LabeledGraph
from .hashing import bucket64

DIM_DEFAULT = 64


class EmbeddingDimensionError(GraphError):
    """An embedder returned a vector of unexpected length."""


@dataclass(frozen=True)
class RecourseVector:
    """Directed embedding-space difference z(target) - z(source)."""

    vec: np.ndarray
    source: int          # input-graph index
    target: bytes        # canonical key of the counterfactual

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))


class WLHashEmbedder:
    """Deterministic WL-subtree feature-hashing embedder.

    Counts subtree patterns over ``rounds`` WL refinements, hashes each
    pattern to one of ``dim`` buckets with a ±1 sign, and scales the vector
    by scale / (|V| + |E| + 1).
    """

    def __init__(self, dim: int = DIM_DEFAULT, rounds: int = 3, seed: int = 0,
                 scale: float = 0.15):
        self.dim = dim
        self.rounds = rounds
        self.seed = seed
        self.scale = scale
        self.salt = str(seed).encode()[:16]
        self._cache: dict[LabeledGraph, np.ndarray] = {}
        self._buckets: dict[int, tuple[int, float]] = {}
        self._epoch = wl.EPOCH

    def get_params(self) -> dict:
        return {"dim": self.dim, "rounds": self.rounds, "seed": self.seed,
                "scale": self.scale}

    def _bucket(self, t: int, color: int) -> tuple[int, int]:
        key = (t << 44) | color
        got = self._buckets.get(key)
        if got is None:
            payload = b"%d:" % t + wl.stable_hash(color)
            x = bucket64(payload, self.salt)
            got = (x % self.dim, 1.0 if (x >> 40) & 1 else -1.0)
            self._buckets[key] = got
        return got

    def embed(self, g: LabeledGraph) -> np.ndarray:
        cached = self._cache.get(g)
        if cached is not None:
            return cached
        return self.embed_refined(g, wl.refine(g.labels, g.adjacency(), self.rounds))

    def embed_refined(self, g: LabeledGraph, colors_rounds,
                      cache: bool = True) -> np.ndarray:
        """Embed from already-computed WL colors (one list per round)."""
        if self._epoch != wl.EPOCH:
            # color ids were renamed by a palette rebuild
            self._buckets.clear()
            self._epoch = wl.EPOCH
        acc = [0.0] * self.dim
        buckets_get = self._buckets.get
        bucket = self._bucket
        for t, colors in enumerate(colors_rounds):
            base = t << 44
            for c in colors:
                got = buckets_get(base | c)
                if got is None:
                    got = bucket(t, c)
                acc[got[0]] += got[1]
        vec = np.array(acc)
        vec *= self.scale / (g.n_nodes + g.n_edges + 1)
        vec.flags.writeable = False
        if cache and len(self._cache) < 500_000:
            self._cache[g] = vec
        return vec


def check_dim(embedder, vec: np.ndarray) -> np.ndarray:
    if vec.shape != (embedder.dim,):
        raise EmbeddingDimensionError(
            f"embedder declared dim {embedder.dim}, returned shape {vec.shape}"
        )
    if not np.all(np.isfinite(vec)):
        raise EmbeddingDimensionError("embedding has non-finite entries")
    return vec


def dist(embedder, g1: LabeledGraph, g2: LabeledGraph) -> float:
    """Euclidean distance between embeddings."""
    z1 = check_dim(embedder, embedder.embed(g1))
    z2 = check_dim(embedder, embedder.embed(g2))
    return float(np.linalg.norm(z1 - z2))


def make_recourse(embedder, g_idx: int, g: LabeledGraph, h: LabeledGraph,
                  theta: float) -> RecourseVector | None:
    """Recourse vector for the pair (g, h), or None if h is farther than theta.

    The caller is responsible for h being accept-classified; the distance
    check uses a closed ball (distance exactly theta is accepted).
    """
    from .canonical import canonical_key

    zg = check_dim(embedder, embedder.embed(g))
    zh = check_dim(embedder, embedder.embed(h))
    if float(np.linalg.norm(zh - zg)) > theta:
        return None
    return RecourseVector(vec=zh - zg, source=g_idx, target=canonical_key(h))
