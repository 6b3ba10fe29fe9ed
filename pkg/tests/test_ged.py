import random

import networkx as nx
import pytest

from graphrecourse.canonical import canonical_key
from graphrecourse.datasets import random_graph
from graphrecourse.ged import GedCapError, exact_ged, normalized_ged
from graphrecourse.graphs import GraphError, LabeledGraph, apply_edit, iter_edits

from conftest import path3, triangle


def nx_ged(g1, g2):
    """Independent oracle: networkx exact GED with matching unit costs."""
    def to_nx(g):
        ng = nx.Graph()
        for u, lab in enumerate(g.labels):
            ng.add_node(u, label=lab)
        ng.add_edges_from(g.edges)
        return ng

    return int(nx.graph_edit_distance(
        to_nx(g1), to_nx(g2),
        node_subst_cost=lambda a, b: 0 if a["label"] == b["label"] else 1,
    ))


class TestFixtures:
    def test_triangle_vs_path(self):
        assert exact_ged(triangle(), path3()) == 1

    def test_normalized_triangle_vs_path(self):
        assert normalized_ged(triangle(), path3()) == pytest.approx(1 / 11)

    def test_single_relabel(self):
        assert exact_ged(LabeledGraph.build("C"), LabeledGraph.build("N")) == 1

    def test_empty_to_graph(self):
        g = LabeledGraph.build("CC", [(0, 1)])
        assert exact_ged(LabeledGraph.build(""), g) == 3

    def test_identical_graphs(self):
        g = LabeledGraph.build("CNO", [(0, 1), (1, 2)])
        assert exact_ged(g, g) == 0

    def test_cap_raises(self):
        g = LabeledGraph.build("C" * 7)
        with pytest.raises(GedCapError):
            exact_ged(g, g)

    def test_normalized_undefined_for_empty_pair(self):
        with pytest.raises(GraphError):
            normalized_ged(LabeledGraph.build(""), LabeledGraph.build(""))


class TestAgainstNetworkx:
    def test_random_pairs_match(self):
        for seed in range(40):
            r = random.Random(seed)
            g1 = random_graph(r, r.randint(1, 4), "CN", 0.4)
            g2 = random_graph(r, r.randint(1, 4), "CN", 0.4)
            assert exact_ged(g1, g2) == nx_ged(g1, g2), (g1, g2)


class TestMetricProperties:
    def pairs(self, count=12):
        graphs = []
        for seed in range(count):
            r = random.Random(seed)
            graphs.append(random_graph(r, r.randint(1, 4), "CN", 0.4))
        return graphs

    def test_symmetry(self):
        gs = self.pairs()
        for a in gs:
            for b in gs:
                assert exact_ged(a, b) == exact_ged(b, a)

    def test_zero_iff_isomorphic(self):
        gs = self.pairs()
        for a in gs:
            for b in gs:
                assert (exact_ged(a, b) == 0) == (canonical_key(a) == canonical_key(b))

    def test_triangle_inequality(self):
        gs = self.pairs(8)
        for a in gs:
            for b in gs:
                for c in gs:
                    assert exact_ged(a, c) <= exact_ged(a, b) + exact_ged(b, c)

    def test_one_edit_distance_at_most_one(self):
        for seed in range(15):
            r = random.Random(seed)
            g = random_graph(r, r.randint(1, 4), "CN", 0.4)
            for e in iter_edits(g, "CN"):
                h = apply_edit(g, e)
                if h.n_nodes <= 6:
                    assert exact_ged(g, h) <= 1
