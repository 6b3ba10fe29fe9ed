"""Canonical identity for labeled graphs.

Graphs up to ``exact_cap`` nodes get an exact canonical form computed by
color refinement with individualization backtracking, so isomorphic graphs
map to identical keys.  Larger graphs get a Weisfeiler-Lehman refinement
digest: identical graphs always collide, non-isomorphic ones may (rarely)
collide, which visit counting tolerates.
"""

from __future__ import annotations

from functools import lru_cache

from . import wl
from .hashing import h128
from .graphs import LabeledGraph

EXACT_CAP_DEFAULT = 10
WL_ROUNDS = 3


def _refine(adj: list[list[int]], colors: list[int]) -> list[int]:
    """Iterate (color, sorted neighbor colors) until the partition stabilizes.

    Color ids are normalized to ranks of the sorted signature set each round,
    so the fixpoint is reached exactly when the partition stops refining.
    """
    n = len(colors)
    while True:
        sigs = []
        for u in range(n):
            nb = [colors[v] for v in adj[u]]
            nb.sort()
            sigs.append((colors[u], *nb))
        palette = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [palette[s] for s in sigs]
        if new == colors:
            return colors
        colors = new


def _encode(g: LabeledGraph, order: list[int]) -> bytes:
    """Byte encoding of g under the node ordering (position of node = rank)."""
    rank = {u: i for i, u in enumerate(order)}
    labels = ",".join(g.labels[u] for u in order)
    bits = sorted((min(rank[u], rank[v]), max(rank[u], rank[v])) for u, v in g.edges)
    return f"{g.n_nodes};{labels};{bits}".encode()


def _canon_search(g: LabeledGraph, adj: list[list[int]], colors: list[int]) -> bytes:
    colors = _refine(adj, colors)
    cells: dict[int, list[int]] = {}
    for u, c in enumerate(colors):
        cells.setdefault(c, []).append(u)
    target = None
    for c in sorted(cells):
        if len(cells[c]) > 1:
            target = cells[c]
            break
    if target is None:
        order = sorted(range(g.n_nodes), key=lambda u: colors[u])
        return _encode(g, order)
    fresh = max(colors) + 1
    best = None
    for u in target:
        branch = list(colors)
        branch[u] = fresh
        enc = _canon_search(g, adj, branch)
        if best is None or enc < best:
            best = enc
    return best


@lru_cache(maxsize=200_000)
def canonical_key(g: LabeledGraph, exact_cap: int = EXACT_CAP_DEFAULT) -> bytes:
    """Deterministic key, equal for isomorphic graphs within the exact regime."""
    adj = g.adjacency()
    final = wl.refine(g.labels, adj, WL_ROUNDS)[-1]
    if g.n_nodes <= exact_cap:
        return b"X:" + exact_key_from_refined(g, adj, final)
    return b"W:" + digest_from_colors(g.n_nodes, g.n_edges, final)


def exact_key_from_refined(g: LabeledGraph, adj: list[list[int]],
                           final: list[int]) -> bytes:
    """Exact canonical encoding seeded from refined WL colors.

    The seed partition is ranked by structure-stable hashes, so it is
    isomorphism-invariant and the individualization search stays canonical.
    """
    order = {c: i for i, c in enumerate(sorted(set(final), key=wl.stable_hash))}
    return _canon_search(g, adj, [order[c] for c in final])


def wl_digest(g: LabeledGraph, adj=None, rounds: int = WL_ROUNDS) -> bytes:
    """Digest of WL color refinement; permutation-invariant by construction."""
    if adj is None:
        adj = g.adjacency()
    final = wl.refine(g.labels, adj, rounds)[-1]
    return digest_from_colors(g.n_nodes, g.n_edges, final)


def digest_from_colors(n_nodes: int, n_edges: int, final: list[int]) -> bytes:
    """WL digest given already-refined final-round colors."""
    payload = b"%d;%d;" % (n_nodes, n_edges)
    payload += b"".join(sorted(wl.stable_hash(c) for c in final))
    return h128(payload)


def isomorphic_brute_force(g1: LabeledGraph, g2: LabeledGraph) -> bool:
    """Exhaustive isomorphism check (test oracle, small graphs only)."""
    from itertools import permutations

    if g1.n_nodes != g2.n_nodes or g1.n_edges != g2.n_edges:
        return False
    if sorted(g1.labels) != sorted(g2.labels):
        return False
    nodes = range(g1.n_nodes)
    for perm in permutations(nodes):
        if any(g1.labels[u] != g2.labels[perm[u]] for u in nodes):
            continue
        mapped = {tuple(sorted((perm[u], perm[v]))) for u, v in g1.edges}
        if mapped == set(g2.edges):
            return True
    return False
