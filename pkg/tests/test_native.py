"""Differential tests: the C extension must match the pure-Python path."""

import random

import numpy as np
import pytest

from graphrecourse import _native
from graphrecourse.classifiers import ForbiddenMotifClassifier
from graphrecourse.datasets import NITRO_MOTIF, synthetic_motif_corpus
from graphrecourse.embedding import WLHashEmbedder
from graphrecourse.walk import EditSpace, NeighborhoodCapError

from conftest import random_graphs

pytestmark = pytest.mark.skipif(_native.ext is None,
                                reason="native extension not built")

ALPHA = ("C", "N", "O")


def make_spaces(clf=None, cap=20_000):
    clf = clf or ForbiddenMotifClassifier(NITRO_MOTIF)
    emb = WLHashEmbedder(seed=0)
    fast = EditSpace(clf, emb, ALPHA, neighbor_cap=cap)
    slow = EditSpace(clf, emb, ALPHA, neighbor_cap=cap)
    slow._native = False          # force the pure-Python reference path
    assert fast._native
    return fast, slow


class TestAnalyze:
    def test_keys_and_embeddings_match_python(self):
        fast, slow = make_spaces()
        for g in random_graphs(101, 40, 2, 12):
            a, b = fast.node(g), slow.node(g)
            assert a.key == b.key
            assert np.array_equal(a.z, b.z)

    def test_keys_deterministic_across_spaces(self):
        # The interned label palette must not leak state between graphs.
        gs = random_graphs(55, 20, 2, 10, alphabet="CNOSF")
        f1, _ = make_spaces()
        k1 = [f1.node(g).key for g in gs]
        f2, _ = make_spaces()
        k2 = [f2.node(g).key for g in reversed(gs)]
        assert k1 == list(reversed(k2))


class TestExpand:
    def test_neighborhood_matches_python(self):
        fast, slow = make_spaces()
        for g in random_graphs(202, 12, 2, 8):
            na, za = fast.neighborhood(fast.node(g))
            nb, zb = slow.neighborhood(slow.node(g))
            assert [n.key for n in na] == [n.key for n in nb]
            assert np.array_equal(za, zb)
            # materialized child graphs land on the same canonical state
            for x in na:
                assert slow.node(x.graph).key == x.key

    def test_accept_flags_match_classifier(self):
        clf = ForbiddenMotifClassifier(NITRO_MOTIF)
        fast, _ = make_spaces(clf)
        ds = synthetic_motif_corpus(30, seed=11)
        checked = 0
        for g in ds.graphs[:12]:
            nodes, _ = fast.neighborhood(fast.node(g))
            for n in nodes:
                assert n.p is not None
                assert n.p == (1.0 if clf._accepts(n.graph) else 0.0)
                checked += 1
        assert checked > 100

    def test_over_cap_raises(self):
        fast, _ = make_spaces(cap=5)
        g = random_graphs(7, 1, 8, 8)[0]
        with pytest.raises(NeighborhoodCapError):
            fast.neighborhood(fast.node(g))


class TestEditCodes:
    def test_decode_reaches_same_state(self):
        from graphrecourse.graphs import apply_edit

        fast, slow = make_spaces()
        g = random_graphs(9, 1, 6, 6)[0]
        na, _ = fast.neighborhood(fast.node(g))
        for x in na:
            assert isinstance(x._edit, int)
            child = apply_edit(g, _native.decode_edit(x._edit))
            assert slow.node(child).key == x.key
