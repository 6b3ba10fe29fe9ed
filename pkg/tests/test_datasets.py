import itertools
import random

import pytest

from graphrecourse.classifiers import ForbiddenMotifClassifier
from graphrecourse.datasets import (BLANK_LABEL, Dataset, DatasetError,
                                    NITRO_MOTIF, filter_rare_labels,
                                    gen_reduction_instance, load_tu,
                                    reject_subset, synthetic_motif_corpus,
                                    write_tu)
from graphrecourse.graphs import LabeledGraph, apply_edit


def tiny_dataset():
    return Dataset(
        graphs=[LabeledGraph.build("CN", [(0, 1)]), LabeledGraph.build("OO")],
        class_labels=[0, 1], name="tiny")


class TestDataset:
    def test_length_mismatch_rejected(self):
        with pytest.raises(DatasetError):
            Dataset(graphs=[LabeledGraph.build("C")], class_labels=[0, 1])

    def test_label_alphabet(self):
        assert tiny_dataset().label_alphabet == ("C", "N", "O")


class TestTuRoundTrip:
    def test_write_then_load(self, tmp_path):
        ds = tiny_dataset()
        write_tu(ds, str(tmp_path / "tiny"))
        back = load_tu(str(tmp_path / "tiny"))
        assert back.graphs == ds.graphs
        assert back.class_labels == ds.class_labels

    def test_missing_file_named(self, tmp_path):
        with pytest.raises(DatasetError, match="missing dataset file"):
            load_tu(str(tmp_path / "nothing"))

    def test_bad_edge_line_number(self, tmp_path):
        d = tmp_path / "tiny"
        write_tu(tiny_dataset(), str(d))
        a = d / "tiny_A.txt"
        a.write_text("1, 2\ngarbage\n")
        with pytest.raises(DatasetError, match="line 2"):
            load_tu(str(d))

    def test_cross_graph_edge_rejected(self, tmp_path):
        d = tmp_path / "tiny"
        write_tu(tiny_dataset(), str(d))
        (d / "tiny_A.txt").write_text("1, 3\n")
        with pytest.raises(DatasetError, match="spans graphs"):
            load_tu(str(d))

    def test_non_integer_indicator(self, tmp_path):
        d = tmp_path / "tiny"
        write_tu(tiny_dataset(), str(d))
        (d / "tiny_graph_indicator.txt").write_text("1\nx\n")
        with pytest.raises(DatasetError, match="line 2"):
            load_tu(str(d))


class TestFilterRareLabels:
    def test_drops_graphs_with_rare_labels(self):
        common = [LabeledGraph.build("CC") for _ in range(30)]
        rare = [LabeledGraph.build("CX")]
        ds = Dataset(graphs=common + rare, class_labels=[0] * 31)
        out = filter_rare_labels(ds, min_count=5)
        assert len(out) == 30
        assert "X" not in out.label_alphabet

    def test_idempotent(self):
        ds = Dataset(graphs=[LabeledGraph.build("CC")] * 12 +
                     [LabeledGraph.build("CN")],
                     class_labels=[0] * 13)
        once = filter_rare_labels(ds, min_count=5)
        twice = filter_rare_labels(once, min_count=5)
        assert once.graphs == twice.graphs


class TestRejectSubset:
    def test_by_stored_label(self):
        ds = tiny_dataset()
        assert reject_subset(ds) == [ds.graphs[0]]

    def test_by_live_classifier(self):
        ds = synthetic_motif_corpus(20, seed=1)
        clf = ForbiddenMotifClassifier(NITRO_MOTIF)
        out = reject_subset(ds, clf)
        assert out == [g for g in ds.graphs if not clf.predict(g).accept]

    def test_warns_when_empty(self):
        ds = Dataset(graphs=[LabeledGraph.build("C")], class_labels=[1])
        with pytest.warns(UserWarning):
            assert reject_subset(ds) == []


class TestReductionInstance:
    def test_recourse_matches_set_membership(self):
        """Applying recourse i fixes exactly the inputs in family set i."""
        universe = list(range(6))
        family = [{0, 1, 2}, {2, 3}, {4}]
        ds, clf, recourse = gen_reduction_instance(universe, family)
        assert len(ds.graphs) == len(universe)
        assert len(recourse) == len(family)
        for j, g in enumerate(ds.graphs):
            assert not clf.predict(g).accept
            for i, edit in enumerate(recourse):
                fixed = clf.predict(apply_edit(g, edit)).accept
                assert fixed == (universe[j] in family[i]), (i, j)

    def test_random_instances(self):
        for seed in range(20):
            r = random.Random(seed)
            universe = list(range(r.randint(1, 8)))
            family = [set(r.sample(universe, r.randint(1, len(universe))))
                      for _ in range(r.randint(1, 5))]
            ds, clf, recourse = gen_reduction_instance(universe, family)
            for j, g in enumerate(ds.graphs):
                covered = {i for i, e in enumerate(recourse)
                           if clf.predict(apply_edit(g, e)).accept}
                expected = {i for i, s in enumerate(family) if universe[j] in s}
                assert covered == expected

    def test_blank_fillers_never_pair(self):
        ds, clf, _ = gen_reduction_instance([0, 1], [{0}])
        for g in ds.graphs:
            assert g.labels.count(BLANK_LABEL) >= 1
            assert not clf.predict(g).accept

    def test_empty_family_rejected(self):
        with pytest.raises(DatasetError):
            gen_reduction_instance([0], [])


class TestSyntheticCorpus:
    def test_deterministic(self):
        a = synthetic_motif_corpus(25, seed=3)
        b = synthetic_motif_corpus(25, seed=3)
        assert a.graphs == b.graphs and a.class_labels == b.class_labels

    def test_labels_match_classifier(self):
        ds = synthetic_motif_corpus(40, seed=2)
        clf = ForbiddenMotifClassifier(NITRO_MOTIF)
        for g, y in zip(ds.graphs, ds.class_labels):
            assert y == (1 if clf.predict(g).accept else 0)

    def test_size_bounds_and_reject_majority(self):
        ds = synthetic_motif_corpus(200, seed=0)
        assert len(ds) == 200
        assert all(6 <= g.n_nodes <= 12 for g in ds.graphs)
        assert ds.class_labels.count(0) > 100
