"""Parsing and serialization of the line-oriented graph text format.

The format is the engine's wire representation: a header line ``n m``, then
one node label per line, then one ``u v`` edge per line (0-indexed,
undirected, u < v after normalization).
"""

from __future__ import annotations

from dataclasses import dataclass


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    labels: tuple[str, ...]
    edges: frozenset[tuple[int, int]]

    @property
    def n_nodes(self) -> int:
        return len(self.labels)


def _norm(u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise GraphFormatError(f"self-loop at node {u}")
    return (u, v) if u < v else (v, u)


def parse(text: str) -> Graph:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty graph text")
    try:
        n, m = map(int, lines[0].split())
    except ValueError as exc:
        raise GraphFormatError(f"bad header {lines[0]!r}") from exc
    if n < 0 or m < 0 or len(lines) != 1 + n + m:
        raise GraphFormatError(
            f"expected {1 + n + m} lines for n={n} m={m}, got {len(lines)}")
    labels = tuple(lines[1:1 + n])
    edges = set()
    for line in lines[1 + n:]:
        try:
            u, v = map(int, line.split())
        except ValueError as exc:
            raise GraphFormatError(f"bad edge line {line!r}") from exc
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge ({u},{v}) outside {n} nodes")
        edges.add(_norm(u, v))
    if len(edges) != m:
        raise GraphFormatError("duplicate edges in graph text")
    return Graph(labels, frozenset(edges))


def serialize(g: Graph) -> str:
    lines = [f"{g.n_nodes} {len(g.edges)}"]
    lines.extend(g.labels)
    lines.extend(f"{u} {v}" for u, v in sorted(g.edges))
    return "\n".join(lines) + "\n"


def adjacency(g: Graph) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in g.labels]
    for u, v in g.edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj
