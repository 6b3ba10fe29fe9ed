"""Binary classifier contract and deterministic built-in rule classifiers.

A classifier exposes ``predict(graph) -> Prediction`` and
``predict_batch(graphs) -> list[Prediction]``; accept means p_accept > 0.5,
ties classify reject.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import _native
from .graphs import LabeledGraph


@dataclass(frozen=True)
class Prediction:
    p_accept: float

    def __post_init__(self):
        if not 0.0 <= self.p_accept <= 1.0:
            raise ValueError(f"p_accept {self.p_accept} outside [0, 1]")

    @property
    def accept(self) -> bool:
        return self.p_accept > 0.5


class RuleClassifier:
    """Base for pure rule classifiers: implement ``_accepts``."""

    def _accepts(self, g: LabeledGraph) -> bool:
        raise NotImplementedError

    def predict(self, g: LabeledGraph) -> Prediction:
        return Prediction(1.0 if self._accepts(g) else 0.0)

    def predict_batch(self, gs: list[LabeledGraph]) -> list[Prediction]:
        return [self.predict(g) for g in gs]


class SameLabelPairClassifier(RuleClassifier):
    """Accepts iff two nodes share a label.

    Labels in ``ignore`` (e.g. a blank placeholder) never form a pair.
    """

    def __init__(self, ignore: frozenset[str] = frozenset()):
        self.ignore = frozenset(ignore)

    def _accepts(self, g: LabeledGraph) -> bool:
        seen = set()
        for lab in g.labels:
            if lab in self.ignore:
                continue
            if lab in seen:
                return True
            seen.add(lab)
        return False


def _connected_order(motif: LabeledGraph) -> list[int]:
    """Visit order preferring nodes adjacent to already-ordered ones."""
    adj = motif.adjacency()
    order: list[int] = []
    placed = set()
    while len(order) < motif.n_nodes:
        pick = next((u for u in range(motif.n_nodes) if u not in placed
                     and any(v in placed for v in adj[u])), None)
        if pick is None:
            pick = next(u for u in range(motif.n_nodes) if u not in placed)
        order.append(pick)
        placed.add(pick)
    return order


class ForbiddenMotifClassifier(RuleClassifier):
    """Accepts iff the graph does NOT contain the motif as a subgraph.

    Containment is subgraph monomorphism with exact label match, so deleting
    one motif edge is enough to flip a minimal occurrence.
    """

    def __init__(self, motif: LabeledGraph):
        self.motif = motif
        self._order = _connected_order(motif)
        adj = motif.adjacency()
        pos = {u: i for i, u in enumerate(self._order)}
        # For each step, motif neighbors that were mapped in earlier steps.
        self._back = [
            [pos[v] for v in adj[u] if pos[v] < i]
            for i, u in enumerate(self._order)
        ]
        self._need: dict[str, int] = {}
        for lab in motif.labels:
            self._need[lab] = self._need.get(lab, 0) + 1
        if _native.ext is not None:
            from array import array

            self._m_lab = _native.marshal_labels(
                motif.labels[u] for u in self._order)
            offs, tgts = [0], []
            for bk in self._back:
                tgts.extend(bk)
                offs.append(len(tgts))
            self._m_boff = array("i", offs).tobytes()
            self._m_btgt = array("i", tgts).tobytes()

    def motif_marshal(self):
        """Marshaled motif buffers for in-expansion native classification."""
        if _native.ext is None:
            return None
        return self._m_lab, self._m_boff, self._m_btgt

    def _accepts(self, g: LabeledGraph) -> bool:
        if g.n_nodes < self.motif.n_nodes or g.n_edges < self.motif.n_edges:
            return True
        have: dict[str, int] = {}
        for lab in g.labels:
            have[lab] = have.get(lab, 0) + 1
        if any(have.get(lab, 0) < k for lab, k in self._need.items()):
            return True
        if _native.ext is not None and g.n_nodes <= _native.MAX_NATIVE_NODES:
            labm, edgem = _native.marshal_graph(g)
            return not _native.ext.has_motif(labm, edgem, self._m_lab,
                                             self._m_boff, self._m_btgt)
        adj = [set(ns) for ns in g.adjacency()]
        labels = g.labels
        order, back = self._order, self._back
        mlabels = self.motif.labels
        image: list[int] = []
        used = set()

        def extend(i: int) -> bool:
            if i == len(order):
                return True
            want = mlabels[order[i]]
            anchors = back[i]
            pool = adj[image[anchors[0]]] if anchors else range(g.n_nodes)
            for cand in pool:
                if cand in used or labels[cand] != want:
                    continue
                if any(cand not in adj[image[j]] for j in anchors):
                    continue
                image.append(cand)
                used.add(cand)
                if extend(i + 1):
                    return True
                image.pop()
                used.discard(cand)
            return False

        return not extend(0)


class TriangleThresholdClassifier(RuleClassifier):
    """Accepts iff the graph has at least ``min_triangles`` triangles."""

    def __init__(self, min_triangles: int = 1):
        self.min_triangles = min_triangles

    def _accepts(self, g: LabeledGraph) -> bool:
        count = 0
        adj = [set(ns) for ns in (g.adjacency())]
        for u, v in g.edges:
            count += len(adj[u] & adj[v])
        return count // 3 >= self.min_triangles


BUILTIN_CLASSIFIERS = {
    "same_label_pair": SameLabelPairClassifier,
    "forbidden_motif": ForbiddenMotifClassifier,
    "triangle_threshold": TriangleThresholdClassifier,
}
