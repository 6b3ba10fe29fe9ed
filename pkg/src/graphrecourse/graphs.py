"""Labeled graphs, atomic edits and edit-neighborhood enumeration.

Graphs are immutable: node ids are dense integers 0..n-1, each node carries
exactly one label from a finite alphabet, edges are undirected with no
self-loops or parallel edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator


class GraphError(ValueError):
    pass


class EditPreconditionError(GraphError):
    """An edit's precondition does not hold on the target graph."""


class NeighborhoodCapError(GraphError):
    """Edit-neighborhood enumeration would exceed the configured cap."""


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise GraphError(f"self-loop on node {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class LabeledGraph:
    """Undirected graph with one discrete label per node."""

    labels: tuple[str, ...]
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        n = len(self.labels)
        for u, v in self.edges:
            if not (0 <= u < v < n):
                raise GraphError(f"edge ({u},{v}) invalid for {n} nodes")

    @staticmethod
    def build(labels: Iterable[str], edges: Iterable[tuple[int, int]] = ()) -> "LabeledGraph":
        """Build a graph, normalizing edge orientation and deduplicating."""
        return LabeledGraph(tuple(labels), frozenset(_norm_edge(u, v) for u, v in edges))

    @property
    def n_nodes(self) -> int:
        return len(self.labels)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, u: int) -> int:
        return sum(1 for e in self.edges if u in e)

    def neighbors_of(self, u: int) -> list[int]:
        return [v if a == u else a for a, v in self.edges if u in (a, v)]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.labels]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def relabel_nodes(self, perm: dict[int, int]) -> "LabeledGraph":
        """Apply a node permutation (old id -> new id)."""
        labels = [""] * self.n_nodes
        for old, new in perm.items():
            labels[new] = self.labels[old]
        edges = [(perm[u], perm[v]) for u, v in self.edges]
        return LabeledGraph.build(labels, edges)

    # -- serialization: line format "n m" / one label per node / one "u v" per edge

    def to_text(self) -> str:
        lines = [f"{self.n_nodes} {self.n_edges}"]
        lines.extend(self.labels)
        lines.extend(f"{u} {v}" for u, v in sorted(self.edges))
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "LabeledGraph":
        lines = text.splitlines()
        if not lines:
            raise GraphError("empty graph text")
        try:
            n, m = map(int, lines[0].split())
        except ValueError as exc:
            raise GraphError(f"bad header {lines[0]!r}") from exc
        if len(lines) != 1 + n + m:
            raise GraphError(f"expected {1 + n + m} lines, got {len(lines)}")
        labels = lines[1 : 1 + n]
        edges = []
        for line in lines[1 + n :]:
            u, v = map(int, line.split())
            edges.append((u, v))
        g = LabeledGraph.build(labels, edges)
        if g.n_edges != m:
            raise GraphError("duplicate edges in serialized graph")
        return g


@dataclass(frozen=True)
class GraphEdit:
    """One unit-cost atomic edit.

    kinds: insert_node(label), delete_node(node, isolated only),
    insert_edge(u, v), delete_edge(u, v), relabel(node, label).
    """

    kind: str
    node: int | None = None
    other: int | None = None
    label: str | None = None

    KINDS = ("insert_node", "delete_node", "insert_edge", "delete_edge", "relabel")

    @staticmethod
    def insert_node(label: str) -> "GraphEdit":
        return GraphEdit("insert_node", label=label)

    @staticmethod
    def delete_node(node: int) -> "GraphEdit":
        return GraphEdit("delete_node", node=node)

    @staticmethod
    def insert_edge(u: int, v: int) -> "GraphEdit":
        u, v = _norm_edge(u, v)
        return GraphEdit("insert_edge", node=u, other=v)

    @staticmethod
    def delete_edge(u: int, v: int) -> "GraphEdit":
        u, v = _norm_edge(u, v)
        return GraphEdit("delete_edge", node=u, other=v)

    @staticmethod
    def relabel(node: int, label: str) -> "GraphEdit":
        return GraphEdit("relabel", node=node, label=label)


def apply_edit(g: LabeledGraph, e: GraphEdit) -> LabeledGraph:
    """Apply one atomic edit, returning a new graph.

    Raises EditPreconditionError when the edit is not applicable.  Deleting a
    node requires it to be isolated; node ids above the deleted one shift
    down by one to keep ids dense.
    """
    n = g.n_nodes
    if e.kind == "insert_node":
        if e.label is None:
            raise EditPreconditionError("insert_node requires a label")
        return LabeledGraph(g.labels + (e.label,), g.edges)
    if e.kind == "delete_node":
        u = e.node
        if u is None or not 0 <= u < n:
            raise EditPreconditionError(f"delete_node: node {u} not in graph")
        if g.degree(u) != 0:
            raise EditPreconditionError(f"delete_node: node {u} is not isolated")
        labels = g.labels[:u] + g.labels[u + 1 :]
        shift = lambda x: x if x < u else x - 1  # noqa: E731
        return LabeledGraph.build(labels, ((shift(a), shift(b)) for a, b in g.edges))
    if e.kind == "insert_edge":
        u, v = e.node, e.other
        if u is None or v is None or not (0 <= u < n and 0 <= v < n):
            raise EditPreconditionError(f"insert_edge: endpoints ({u},{v}) not in graph")
        if g.has_edge(u, v):
            raise EditPreconditionError(f"insert_edge: edge ({u},{v}) already present")
        return LabeledGraph(g.labels, g.edges | {_norm_edge(u, v)})
    if e.kind == "delete_edge":
        u, v = e.node, e.other
        if u is None or v is None or not g.has_edge(u, v):
            raise EditPreconditionError(f"delete_edge: edge ({u},{v}) absent")
        return LabeledGraph(g.labels, g.edges - {_norm_edge(u, v)})
    if e.kind == "relabel":
        u = e.node
        if u is None or not 0 <= u < n:
            raise EditPreconditionError(f"relabel: node {u} not in graph")
        if g.labels[u] == e.label:
            raise EditPreconditionError(f"relabel: node {u} already labeled {e.label!r}")
        labels = list(g.labels)
        labels[u] = e.label
        return LabeledGraph(tuple(labels), g.edges)
    raise EditPreconditionError(f"unknown edit kind {e.kind!r}")


def iter_edits(g: LabeledGraph, alphabet: Iterable[str]) -> Iterator[GraphEdit]:
    """Every atomic edit applicable to g over the given label alphabet."""
    alphabet = sorted(set(alphabet))
    if not alphabet:
        raise GraphError("empty label alphabet")
    n = g.n_nodes
    for lab in alphabet:
        yield GraphEdit.insert_node(lab)
    for u in range(n):
        if g.degree(u) == 0:
            yield GraphEdit.delete_node(u)
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) in g.edges:
                yield GraphEdit.delete_edge(u, v)
            else:
                yield GraphEdit.insert_edge(u, v)
    for u in range(n):
        for lab in alphabet:
            if lab != g.labels[u]:
                yield GraphEdit.relabel(u, lab)


def edit_neighbor_items(
    g: LabeledGraph,
    alphabet: Iterable[str],
    max_neighbors: int | None = None,
) -> list[tuple[bytes, LabeledGraph]]:
    """(canonical key, graph) pairs one edit from g, deduplicated up to
    isomorphism, sorted by key.  Never contains g itself.  Raises
    NeighborhoodCapError when the result would exceed max_neighbors.
    """
    from .canonical import canonical_key

    own = canonical_key(g)
    seen: dict[bytes, LabeledGraph] = {}
    for e in iter_edits(g, alphabet):
        h = apply_edit(g, e)
        key = canonical_key(h)
        if key == own:
            continue
        if key not in seen:
            seen[key] = h
            if max_neighbors is not None and len(seen) > max_neighbors:
                raise NeighborhoodCapError(
                    f"neighborhood of size > {max_neighbors} (cap exceeded)"
                )
    return sorted(seen.items())


def edit_neighbors(
    g: LabeledGraph,
    alphabet: Iterable[str],
    max_neighbors: int | None = None,
) -> list[LabeledGraph]:
    """All graphs exactly one edit away from g; see edit_neighbor_items."""
    return [h for _, h in edit_neighbor_items(g, alphabet, max_neighbors)]
