"""Multi-head vertex-reinforced random walk over graph-edit space.

One walk is a single logical sequence: the k heads are coupled through the
shared lead and the global visit counts.  Transition weights multiply the
classifier's accept probability by one plus the visit count; with a small
probability all heads teleport back to input graphs, preferring inputs few
walks have started from.
"""

from __future__ import annotations

import json
import warnings
from collections import OrderedDict
from dataclasses import dataclass, field

import numpy as np

from . import wl
from . import _native
from .canonical import (EXACT_CAP_DEFAULT, WL_ROUNDS, canonical_key,
                        digest_from_colors, exact_key_from_refined)
from .embedding import WLHashEmbedder, check_dim
from .graphs import (LabeledGraph, NeighborhoodCapError, apply_edit,
                     iter_edits)

WEIGHT_NORMALIZATION_TOL = 1e-12


@dataclass
class WalkConfig:
    theta: float
    k: int = 5
    steps: int = 50_000
    teleport_prob: float = 0.05
    max_radius: float | None = None          # default 3*theta/2
    seed: int = 0
    neighbor_cap: int = 20_000
    alphabet: tuple[str, ...] = ()
    keep_accepted_inputs: bool = False
    neighborhood_cache_size: int = 10_000

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not 0.0 < self.teleport_prob < 1.0:
            raise ValueError("teleport probability must be in (0, 1)")
        if not self.theta > 0:
            raise ValueError("theta must be > 0")
        if self.max_radius is None:
            self.max_radius = 1.5 * self.theta


class _Node:
    """One edit-space state. The graph itself is materialized lazily from a
    (parent graph, edit) pair so that the walk's state table stays small."""

    __slots__ = ("key", "z", "p", "_graph", "_parent", "_edit")

    def __init__(self, key, z, p, graph=None, parent=None, edit=None):
        self.key = key
        self.z = z
        self.p = p
        self._graph = graph
        self._parent = parent
        self._edit = edit

    @property
    def graph(self) -> LabeledGraph:
        if self._graph is None:
            edit = self._edit
            if isinstance(edit, int):     # packed native edit code
                edit = _native.decode_edit(edit)
            self._graph = apply_edit(self._parent, edit)
            self._parent = self._edit = None
        return self._graph


class EditSpace:
    """Cache of edit-space states: canonical key, embedding, accept probability.

    Neighborhoods are expanded lazily, scored with one classifier batch call,
    and kept in an LRU-bounded table keyed by canonical key.
    """

    def __init__(self, classifier, embedder, alphabet, neighbor_cap: int,
                 cache_size: int = 10_000, node_cache_size: int = 600_000):
        self.classifier = classifier
        self.embedder = embedder
        self.alphabet = tuple(sorted(set(alphabet)))
        self.neighbor_cap = neighbor_cap
        self._nodes: OrderedDict[bytes, _Node] = OrderedDict()
        self._nbrs: OrderedDict[bytes, list] = OrderedDict()
        self._cache_size = cache_size
        self._node_cache_size = node_cache_size
        # One WL refinement can serve both the key digest and the embedding
        # when the embedder is the built-in one at the canonical round count.
        self._shared_wl = (isinstance(embedder, WLHashEmbedder)
                           and embedder.rounds == WL_ROUNDS)
        self._native = (_native.ext is not None and self._shared_wl
                        and bool(self.alphabet))
        if self._native:
            self._alpha_buf = _native.marshal_labels(self.alphabet)
            mm = getattr(classifier, "motif_marshal", None)
            self._motif = mm() if mm is not None else None
        else:
            self._motif = None

    def node(self, g: LabeledGraph, parent: LabeledGraph | None = None,
             edit=None) -> _Node:
        if self._native and g.n_nodes <= _native.MAX_NATIVE_NODES:
            labm, edgem = _native.marshal_graph(g)
            key, vecb = _native.ext.analyze(
                labm, edgem, WL_ROUNDS, EXACT_CAP_DEFAULT, self.embedder.dim,
                self.embedder.salt, self.embedder.scale, True)
            n = self._nodes.get(key)
            if n is not None:
                self._nodes.move_to_end(key)
                return n
            z = np.frombuffer(vecb, dtype=np.float64).astype(np.float32)
            if parent is None:
                n = _Node(key, z, None, graph=g)
            else:
                n = _Node(key, z, None, parent=parent, edit=edit)
            self._nodes[key] = n
            if len(self._nodes) > self._node_cache_size:
                self._nodes.popitem(last=False)
            return n
        if self._shared_wl:
            adj = g.adjacency()
            colors_rounds = wl.refine(g.labels, adj, WL_ROUNDS)
            if g.n_nodes > EXACT_CAP_DEFAULT:
                key = b"W:" + digest_from_colors(g.n_nodes, g.n_edges,
                                                 colors_rounds[-1])
            else:
                key = b"X:" + exact_key_from_refined(g, adj, colors_rounds[-1])
            n = self._nodes.get(key)
            if n is not None:
                self._nodes.move_to_end(key)
                return n
            z = self.embedder.embed_refined(g, colors_rounds,
                                            cache=parent is None)
        else:
            key = canonical_key(g)
            n = self._nodes.get(key)
            if n is not None:
                self._nodes.move_to_end(key)
                return n
            z = check_dim(self.embedder, self.embedder.embed(g))
        z = np.asarray(z, dtype=np.float32)
        if parent is None:
            n = _Node(key, z, None, graph=g)
        else:
            n = _Node(key, z, None, parent=parent, edit=edit)
        self._nodes[key] = n
        if len(self._nodes) > self._node_cache_size:
            self._nodes.popitem(last=False)
        return n

    def prob(self, node: _Node) -> float:
        """Accept probability, classified on first demand."""
        if node.p is None:
            node.p = self.classifier.predict(node.graph).p_accept
        return node.p

    def neighborhood(self, node: _Node) -> tuple[list[_Node], np.ndarray]:
        """Neighbor nodes of ``node`` plus stacked embeddings.

        Classifier calls are deferred: followers only need geometry, so
        probabilities are filled in by neighborhood_probs when the lead asks.
        """
        hit = self._nbrs.get(node.key)
        if hit is not None:
            self._nbrs.move_to_end(node.key)
            return hit[0], hit[1]
        g = node.graph
        if self._native and g.n_nodes < _native.MAX_NATIVE_NODES:
            nodes, zs = self._expand_native(node, g)
        else:
            seen: dict[bytes, _Node] = {}
            for e in iter_edits(g, self.alphabet):
                n = self.node(apply_edit(g, e), parent=g, edit=e)
                if n.key == node.key or n.key in seen:
                    continue
                seen[n.key] = n
                if len(seen) > self.neighbor_cap:
                    raise NeighborhoodCapError(
                        f"neighborhood of size > {self.neighbor_cap} (cap exceeded)"
                    )
            nodes = [seen[k] for k in sorted(seen)]
            zs = (np.stack([n.z for n in nodes]) if nodes
                  else np.zeros((0, self.embedder.dim), dtype=np.float32))
        self._nbrs[node.key] = [nodes, zs, None]
        if len(self._nbrs) > self._cache_size:
            self._nbrs.popitem(last=False)
        return nodes, zs

    def _expand_native(self, node: _Node, g: LabeledGraph):
        """One-call native expansion: keys, edits and embeddings at once."""
        labm, edgem = _native.marshal_graph(g)
        motif = self._motif or ()
        ks, codes, zb, accs = _native.ext.expand(
            labm, edgem, self._alpha_buf, WL_ROUNDS, EXACT_CAP_DEFAULT,
            self.embedder.dim, self.embedder.salt, self.embedder.scale,
            node.key, self.neighbor_cap, *motif)
        if ks is None:
            raise NeighborhoodCapError(
                f"neighborhood of size > {self.neighbor_cap} (cap exceeded)")
        Z = np.frombuffer(zb, dtype=np.float32).reshape(-1, self.embedder.dim)
        order = sorted(range(len(ks)), key=ks.__getitem__)
        zs = Z[order] if order else np.zeros((0, self.embedder.dim),
                                             dtype=np.float32)
        nodes = []
        nodes_get = self._nodes.get
        for j, i in enumerate(order):
            key = ks[i]
            n = nodes_get(key)
            if n is None:
                p = float(accs[i]) if accs is not None else None
                n = _Node(key, zs[j], p, parent=g, edit=codes[i])
                self._nodes[key] = n
            else:
                self._nodes.move_to_end(key)
                if n.p is None and accs is not None:
                    n.p = float(accs[i])
            nodes.append(n)
        while len(self._nodes) > self._node_cache_size:
            self._nodes.popitem(last=False)
        return nodes, zs

    def neighborhood_probs(self, node: _Node) -> np.ndarray:
        """Accept probabilities aligned with neighborhood(node)'s nodes."""
        self.neighborhood(node)
        entry = self._nbrs[node.key]
        if entry[2] is None:
            nodes = entry[0]
            fresh = [n for n in nodes if n.p is None]
            if fresh:
                preds = self.classifier.predict_batch([n.graph for n in fresh])
                for n, pred in zip(fresh, preds):
                    n.p = pred.p_accept
            entry[2] = np.array([n.p for n in nodes])
        return entry[2]


@dataclass
class WalkStats:
    steps_done: int = 0
    teleport_steps: int = 0
    forced_teleports: int = 0
    visit_increments: int = 0


@dataclass
class WalkResult:
    candidates: dict[bytes, LabeledGraph]
    visit_counts: dict[bytes, int]
    accept_probs: dict[bytes, float]
    teleports: np.ndarray
    stats: WalkStats = field(default_factory=WalkStats)


def transition_weights(probs: np.ndarray, multipliers: np.ndarray) -> np.ndarray:
    """Normalized sampling distribution p_accept * (visits + 1)."""
    w = probs * multipliers
    total = w.sum()
    if total <= 0:
        raise ValueError("all transition weights are zero")
    w = w / total
    assert abs(w.sum() - 1.0) <= WEIGHT_NORMALIZATION_TOL
    return w


def teleport_distribution(teleport_counts: np.ndarray) -> np.ndarray:
    """softmax(-t): inputs fewer walks started from are preferred."""
    e = np.exp(-(teleport_counts - teleport_counts.min()))
    return e / e.sum()


def lead_transition(space: EditSpace, visits: dict[bytes, int], node: _Node,
                    start_z: np.ndarray, max_radius: float, rng) -> _Node | None:
    """Sample the lead head's next state; None signals a dead end."""
    nodes, zs = space.neighborhood(node)
    if not nodes:
        return None
    mask = np.linalg.norm(zs - start_z, axis=1) <= max_radius
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return None
    ps = space.neighborhood_probs(node)
    mult = np.array([visits.get(nodes[i].key, 0) + 1 for i in idx], dtype=float)
    try:
        probs = transition_weights(ps[idx], mult)
    except ValueError:
        return None
    pick = int(np.searchsorted(np.cumsum(probs), rng.random(), side="right"))
    pick = min(pick, idx.size - 1)
    return nodes[int(idx[pick])]


def follower_transition(space: EditSpace, node: _Node, start_z: np.ndarray,
                        lead_vec: np.ndarray, max_radius: float) -> _Node:
    """Move to the neighbor (or stay) whose displacement best matches the
    lead's recourse vector; ties break toward the smaller canonical key."""
    nodes, zs = space.neighborhood(node)
    candidates = [(float(np.linalg.norm(lead_vec - (node.z - start_z))), node.key, node)]
    if nodes:
        mask = np.linalg.norm(zs - start_z, axis=1) <= max_radius
        diffs = np.linalg.norm(lead_vec - (zs - start_z), axis=1)
        for i in np.flatnonzero(mask):
            candidates.append((float(diffs[i]), nodes[i].key, nodes[i]))
    return min(candidates, key=lambda t: (t[0], t[1]))[2]


def run_vrrw(inputs: list[LabeledGraph], classifier, embedder, cfg: WalkConfig,
             space: EditSpace | None = None,
             checkpoint_path=None, checkpoint_interval: int | None = None,
             ) -> WalkResult:
    """Run the multi-head walk for cfg.steps steps; reproducible from seed."""
    if not cfg.alphabet:
        alphabet = tuple(sorted({lab for g in inputs for lab in g.labels}))
    else:
        alphabet = cfg.alphabet
    if space is None:
        space = EditSpace(classifier, embedder, alphabet, cfg.neighbor_cap,
                          cfg.neighborhood_cache_size)

    keep = []
    for g in inputs:
        if classifier.predict(g).accept and not cfg.keep_accepted_inputs:
            warnings.warn("dropping accept-classified input graph from the walk")
            continue
        keep.append(g)
    if not keep:
        return WalkResult({}, {}, {}, np.zeros(0))
    input_nodes = [space.node(g) for g in keep]

    rng = np.random.default_rng(cfg.seed)
    n_in = len(input_nodes)
    visits: dict[bytes, int] = {}
    teleports = np.zeros(n_in, dtype=int)
    candidates: dict[bytes, LabeledGraph] = {}
    cand_probs: dict[bytes, float] = {}
    stats = WalkStats()

    starts = list(rng.choice(n_in, size=cfg.k, replace=n_in < cfg.k))
    heads = [(int(s), input_nodes[int(s)]) for s in starts]
    for s, _ in heads:
        teleports[s] += 1

    def teleport_all():
        probs = teleport_distribution(teleports)
        cum = np.cumsum(probs)
        new_heads = []
        for _ in range(cfg.k):
            s = int(np.searchsorted(cum, rng.random(), side="right"))
            s = min(s, n_in - 1)
            new_heads.append((s, input_nodes[s]))
        for s, _ in new_heads:
            teleports[s] += 1
        return new_heads

    start = stats.steps_done
    if checkpoint_path is not None:
        loaded = _load_checkpoint(checkpoint_path)
        if loaded is not None:
            visits, teleports, candidates, heads, stats, rng = _restore(
                loaded, space, input_nodes)
            cand_probs = {k: space.prob(space.node(g))
                          for k, g in candidates.items()}
            start = stats.steps_done

    for step in range(start, cfg.steps):
        eps = rng.random() < cfg.teleport_prob
        lead = int(rng.integers(cfg.k))
        if eps:
            stats.teleport_steps += 1
            heads = teleport_all()
        else:
            s_l, node_l = heads[lead]
            nxt = lead_transition(space, visits, node_l,
                                  input_nodes[s_l].z, cfg.max_radius, rng)
            if nxt is None:
                stats.forced_teleports += 1
                heads = teleport_all()
            else:
                lead_vec = nxt.z - input_nodes[s_l].z
                new_heads = list(heads)
                new_heads[lead] = (s_l, nxt)
                for i in range(cfg.k):
                    if i == lead:
                        continue
                    s_i, node_i = heads[i]
                    new_heads[i] = (s_i, follower_transition(
                        space, node_i, input_nodes[s_i].z, lead_vec,
                        cfg.max_radius))
                heads = new_heads
        for _, node in heads:
            visits[node.key] = visits.get(node.key, 0) + 1
            stats.visit_increments += 1
            if space.prob(node) > 0.5:
                candidates[node.key] = node.graph
                cand_probs[node.key] = node.p
        stats.steps_done = step + 1
        if (checkpoint_path is not None and checkpoint_interval
                and stats.steps_done % checkpoint_interval == 0):
            _save_checkpoint(checkpoint_path, visits, teleports, candidates,
                             heads, stats, rng)

    counts = {k: visits.get(k, 0) for k in candidates}
    return WalkResult(candidates=candidates, visit_counts=counts,
                      accept_probs=cand_probs, teleports=teleports, stats=stats)


def top_candidates(result: WalkResult, n: int) -> dict[bytes, LabeledGraph]:
    """The n most-visited candidates; ties by higher accept probability,
    then smaller canonical key."""
    if n < 1:
        raise ValueError("n must be >= 1")
    ranked = sorted(
        result.candidates,
        key=lambda k: (-result.visit_counts[k], -result.accept_probs[k], k),
    )
    return {k: result.candidates[k] for k in ranked[:n]}


CHECKPOINT_VERSION = 1


def _save_checkpoint(path, visits, teleports, candidates, heads, stats, rng):
    doc = {
        "format": "graphrecourse-walk-checkpoint",
        "version": CHECKPOINT_VERSION,
        "steps_done": stats.steps_done,
        "teleport_steps": stats.teleport_steps,
        "forced_teleports": stats.forced_teleports,
        "visit_increments": stats.visit_increments,
        "visits": {k.hex(): v for k, v in visits.items()},
        "teleports": teleports.tolist(),
        "candidates": {k.hex(): g.to_text() for k, g in candidates.items()},
        "heads": [[s, node.graph.to_text()] for s, node in heads],
        "rng_state": _jsonable(rng.bit_generator.state),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, np.ndarray):
        return {"__ndarray__": obj.tolist(), "dtype": str(obj.dtype)}
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def _unjsonable(obj):
    if isinstance(obj, dict):
        if "__ndarray__" in obj:
            return np.array(obj["__ndarray__"], dtype=obj["dtype"])
        return {k: _unjsonable(v) for k, v in obj.items()}
    return obj


def _load_checkpoint(path):
    import os

    if not os.path.exists(path):
        return None
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {doc.get('version')}")
    return doc


def _restore(doc, space: EditSpace, input_nodes):
    visits = {bytes.fromhex(k): v for k, v in doc["visits"].items()}
    teleports = np.array(doc["teleports"], dtype=int)
    candidates = {bytes.fromhex(k): LabeledGraph.from_text(t)
                  for k, t in doc["candidates"].items()}
    heads = [(s, space.node(LabeledGraph.from_text(t))) for s, t in doc["heads"]]
    stats = WalkStats(doc["steps_done"], doc["teleport_steps"],
                      doc["forced_teleports"], doc["visit_increments"])
    rng = np.random.default_rng()
    rng.bit_generator.state = _unjsonable(doc["rng_state"])
    return visits, teleports, candidates, heads, stats, rng
