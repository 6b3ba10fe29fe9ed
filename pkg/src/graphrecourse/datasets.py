"""Dataset loading (TU text layout), preprocessing and synthetic instances."""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .classifiers import SameLabelPairClassifier
from .graphs import GraphEdit, LabeledGraph

BLANK_LABEL = "_"
RARE_LABEL_MIN_COUNT = 50


class DatasetError(ValueError):
    pass


@dataclass
class Dataset:
    graphs: list[LabeledGraph]
    class_labels: list[int]
    name: str = ""

    def __post_init__(self):
        if len(self.graphs) != len(self.class_labels):
            raise DatasetError("graphs and class labels differ in length")

    @property
    def label_alphabet(self) -> tuple[str, ...]:
        return tuple(sorted({lab for g in self.graphs for lab in g.labels}))

    def __len__(self) -> int:
        return len(self.graphs)


def load_tu(directory: str, name: str | None = None) -> Dataset:
    """Load a dataset in the TU text layout.

    Expects ``<name>_A.txt``, ``<name>_graph_indicator.txt``,
    ``<name>_node_labels.txt`` and ``<name>_graph_labels.txt``; 1-indexed
    ids are mapped to 0-indexed, undirected edges deduplicated.
    """
    if name is None:
        name = os.path.basename(os.path.normpath(directory))

    def path(suffix):
        p = os.path.join(directory, f"{name}_{suffix}.txt")
        if not os.path.exists(p):
            raise DatasetError(f"missing dataset file: {p}")
        return p

    indicator = _read_ints(path("graph_indicator"))
    node_labels = [line.strip() for line in open(path("node_labels"))
                   if line.strip()]
    graph_labels = _read_ints(path("graph_labels"))
    n_nodes = len(indicator)
    if len(node_labels) != n_nodes:
        raise DatasetError(
            f"{len(node_labels)} node labels for {n_nodes} indicator entries")
    n_graphs = max(indicator, default=0)
    if sorted(set(indicator)) != list(range(1, n_graphs + 1)):
        raise DatasetError("graph indicator ids are not contiguous from 1")
    if len(graph_labels) != n_graphs:
        raise DatasetError(
            f"{len(graph_labels)} graph labels for {n_graphs} graphs")

    # node id -> (graph index, local id)
    local: list[tuple[int, int]] = []
    counters = [0] * n_graphs
    for gid in indicator:
        gi = gid - 1
        local.append((gi, counters[gi]))
        counters[gi] += 1

    labels_per_graph: list[list[str]] = [[] for _ in range(n_graphs)]
    for (gi, _), lab in zip(local, node_labels):
        labels_per_graph[gi].append(lab)
    edges_per_graph: list[set[tuple[int, int]]] = [set() for _ in range(n_graphs)]
    with open(path("A")) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                a, b = (int(x) for x in line.replace(",", " ").split())
            except ValueError as exc:
                raise DatasetError(f"{name}_A.txt line {lineno}: bad edge {line!r}") from exc
            if not (1 <= a <= n_nodes and 1 <= b <= n_nodes):
                raise DatasetError(
                    f"{name}_A.txt line {lineno}: node id out of range")
            (ga, ia), (gb, ib) = local[a - 1], local[b - 1]
            if ga != gb:
                raise DatasetError(
                    f"{name}_A.txt line {lineno}: edge spans graphs {ga+1} and {gb+1}")
            if ia != ib:
                edges_per_graph[ga].add((min(ia, ib), max(ia, ib)))

    graphs = [LabeledGraph.build(labs, edges)
              for labs, edges in zip(labels_per_graph, edges_per_graph)]
    return Dataset(graphs=graphs, class_labels=graph_labels, name=name)


def _read_ints(path: str) -> list[int]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(int(line))
            except ValueError as exc:
                raise DatasetError(f"{path} line {lineno}: expected integer, "
                                   f"got {line!r}") from exc
    return out


def filter_rare_labels(ds: Dataset, min_count: int = RARE_LABEL_MIN_COUNT) -> Dataset:
    """Drop every graph containing a label whose dataset-wide count is below
    min_count.  Idempotent."""
    counts: dict[str, int] = {}
    for g in ds.graphs:
        for lab in g.labels:
            counts[lab] = counts.get(lab, 0) + 1
    rare = {lab for lab, c in counts.items() if c < min_count}
    keep = [(g, y) for g, y in zip(ds.graphs, ds.class_labels)
            if not any(lab in rare for lab in g.labels)]
    return Dataset(graphs=[g for g, _ in keep],
                   class_labels=[y for _, y in keep], name=ds.name)


def reject_subset(ds: Dataset, classifier=None) -> list[LabeledGraph]:
    """The input set: graphs in the reject class.

    With a classifier, rejection is live prediction; otherwise the stored
    class label 0 decides.  Order-stable.
    """
    if classifier is not None:
        out = [g for g in ds.graphs if not classifier.predict(g).accept]
    else:
        out = [g for g, y in zip(ds.graphs, ds.class_labels) if y == 0]
    if not out:
        import warnings

        warnings.warn(f"dataset {ds.name!r}: no reject graphs")
    return out


def gen_reduction_instance(universe: list, family: list[set]):
    """Max-coverage instance realized as star graphs and center relabels.

    Element u_j becomes a star whose peripheral nodes carry the colors of the
    sets containing u_j (blank-labeled filler otherwise); recourse i relabels
    the blank center to color i, which the same-label-pair classifier accepts
    exactly when u_j is in set i.

    Returns (Dataset, classifier, recourse edit list).
    """
    m = len(family)
    if m < 1:
        raise DatasetError("need at least one set in the family")
    colors = [f"c{i}" for i in range(m)]
    graphs = []
    for u in universe:
        member_colors = [colors[i] for i in range(m) if u in family[i]]
        fillers = [BLANK_LABEL] * (m - len(member_colors))
        labels = [BLANK_LABEL] + member_colors + fillers   # node 0 is the center
        edges = [(0, j) for j in range(1, m + 1)]
        graphs.append(LabeledGraph.build(labels, edges))
    ds = Dataset(graphs=graphs, class_labels=[0] * len(universe),
                 name="max-coverage-reduction")
    classifier = SameLabelPairClassifier(ignore=frozenset({BLANK_LABEL}))
    recourse = [GraphEdit.relabel(0, c) for c in colors]
    return ds, classifier, recourse


def random_graph(rng: random.Random, n_nodes: int, alphabet: str | list[str],
                 edge_prob: float = 0.4) -> LabeledGraph:
    labels = [rng.choice(alphabet) for _ in range(n_nodes)]
    edges = [(u, v) for u in range(n_nodes) for v in range(u + 1, n_nodes)
             if rng.random() < edge_prob]
    return LabeledGraph.build(labels, edges)


NITRO_MOTIF = LabeledGraph.build("NOO", [(0, 1), (0, 2)])


def synthetic_motif_corpus(n_graphs: int = 200, seed: int = 0,
                           max_nodes: int = 12) -> Dataset:
    """Random molecule-like graphs; class 0 iff the nitro-like motif occurs.

    Most graphs get the motif planted so the reject set is large; the class
    label matches the ForbiddenMotifClassifier(NITRO_MOTIF) verdict.
    """
    from .classifiers import ForbiddenMotifClassifier

    rng = random.Random(seed)
    clf = ForbiddenMotifClassifier(NITRO_MOTIF)
    graphs = []
    while len(graphs) < n_graphs:
        n = rng.randint(6, max_nodes)
        g = random_graph(rng, n, "CCCNO", edge_prob=min(0.9, 2.0 / n))
        if rng.random() < 0.8:
            # plant the motif on three random nodes
            nodes = rng.sample(range(n), 3)
            labels = list(g.labels)
            labels[nodes[0]] = "N"
            labels[nodes[1]] = "O"
            labels[nodes[2]] = "O"
            edges = set(g.edges) | {tuple(sorted((nodes[0], nodes[1]))),
                                    tuple(sorted((nodes[0], nodes[2])))}
            g = LabeledGraph.build(labels, edges)
        graphs.append(g)
    labels = [1 if clf.predict(g).accept else 0 for g in graphs]
    return Dataset(graphs=graphs, class_labels=labels, name="synthetic-motif")


def write_tu(ds: Dataset, directory: str) -> None:
    """Write a dataset back out in the TU text layout."""
    os.makedirs(directory, exist_ok=True)
    name = ds.name or "dataset"
    with open(os.path.join(directory, f"{name}_graph_indicator.txt"), "w") as fh:
        for gi, g in enumerate(ds.graphs, 1):
            for _ in range(g.n_nodes):
                fh.write(f"{gi}\n")
    with open(os.path.join(directory, f"{name}_node_labels.txt"), "w") as fh:
        for g in ds.graphs:
            for lab in g.labels:
                fh.write(f"{lab}\n")
    with open(os.path.join(directory, f"{name}_graph_labels.txt"), "w") as fh:
        for y in ds.class_labels:
            fh.write(f"{y}\n")
    offset = 1
    with open(os.path.join(directory, f"{name}_A.txt"), "w") as fh:
        for g in ds.graphs:
            for u, v in sorted(g.edges):
                fh.write(f"{offset + u}, {offset + v}\n")
                fh.write(f"{offset + v}, {offset + u}\n")
            offset += g.n_nodes
