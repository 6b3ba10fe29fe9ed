"""Exact graph edit distance for small graphs.

Unit costs throughout: node insert/delete, edge insert/delete, and node
relabel each cost 1.  The optimum over node assignments equals the length of
the shortest atomic-edit path, so this doubles as the oracle for the walk's
edit-space geometry.
"""

from __future__ import annotations

import heapq

from .graphs import GraphError, LabeledGraph

GED_CAP_DEFAULT = 6


class GedCapError(GraphError):
    """Graph too large for the exact oracle."""


def exact_ged(g1: LabeledGraph, g2: LabeledGraph, cap: int = GED_CAP_DEFAULT) -> int:
    """Minimal number of unit edits making g1 and g2 isomorphic.

    A* over partial injective node assignments g1 -> g2 ∪ {deletion}; edge
    costs are charged when the later endpoint is assigned, insertions for
    unmatched g2 structure are charged on completion.
    """
    if g1.n_nodes > cap or g2.n_nodes > cap:
        raise GedCapError(
            f"exact GED cap is {cap} nodes, got {g1.n_nodes} and {g2.n_nodes}"
        )
    n1, n2 = g1.n_nodes, g2.n_nodes
    if n1 == 0:
        return n2 + g2.n_edges
    adj1 = [[False] * n1 for _ in range(n1)]
    for u, v in g1.edges:
        adj1[u][v] = adj1[v][u] = True
    adj2 = [[False] * n2 for _ in range(n2)]
    for u, v in g2.edges:
        adj2[u][v] = adj2[v][u] = True

    def h(i: int, used: int) -> int:
        # admissible: every surplus node on either side costs one edit
        remaining = n1 - i
        free2 = n2 - bin(used).count("1")
        return abs(remaining - free2)

    # state: (f, g_cost, i, mapping tuple, used-bitmask)
    start = (h(0, 0), 0, 0, (), 0)
    heap = [start]
    best_seen: dict[tuple[int, tuple], int] = {}
    while heap:
        f, cost, i, mapping, used = heapq.heappop(heap)
        if i == n1:
            # completion cost was folded in when the state was pushed
            return cost
        key = (i, mapping)
        if best_seen.get(key, 1 << 30) <= cost:
            continue
        best_seen[key] = cost

        def push(nc: int, nm: tuple, nu: int) -> None:
            j = i + 1
            if j == n1:
                nc += _completion_cost(g2, adj2, nm, nu)
                heapq.heappush(heap, (nc, nc, j, nm, nu))
            else:
                heapq.heappush(heap, (nc + h(j, nu), nc, j, nm, nu))

        # assign node i of g1 to each free node of g2, or delete it
        for v in range(n2):
            if used >> v & 1:
                continue
            step = 0 if g1.labels[i] == g2.labels[v] else 1
            for j in range(i):
                w = mapping[j]
                e1 = adj1[i][j]
                e2 = adj2[v][w] if w >= 0 else False
                if e1 != e2:
                    step += 1
            push(cost + step, mapping + (v,), used | (1 << v))
        step = 1 + sum(1 for j in range(i) if adj1[i][j])
        push(cost + step, mapping + (-1,), used)
    raise AssertionError("unreachable: assignment search exhausted")


def _completion_cost(g2: LabeledGraph, adj2, mapping: tuple, used: int) -> int:
    """Insertions for g2 nodes/edges not reached by the assignment."""
    n2 = g2.n_nodes
    cost = sum(1 for v in range(n2) if not used >> v & 1)
    image = set(m for m in mapping if m >= 0)
    for u, v in g2.edges:
        if u not in image or v not in image:
            cost += 1
    return cost


def normalized_ged(g1: LabeledGraph, g2: LabeledGraph, cap: int = GED_CAP_DEFAULT) -> float:
    """GED divided by |V1| + |V2| + |E1| + |E2| (in [0, 1) for non-empty input)."""
    denom = g1.n_nodes + g2.n_nodes + g1.n_edges + g2.n_edges
    if denom == 0:
        raise GraphError("normalized GED undefined for two empty graphs")
    return exact_ged(g1, g2, cap=cap) / denom
