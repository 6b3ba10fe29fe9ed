import math
import warnings

import numpy as np
import pytest

from graphrecourse.classifiers import SameLabelPairClassifier
from graphrecourse.embedding import WLHashEmbedder
from graphrecourse.graphs import LabeledGraph, edit_neighbor_items
from graphrecourse.walk import (EditSpace, WalkConfig, WalkResult,
                                follower_transition, lead_transition, run_vrrw,
                                teleport_distribution, top_candidates,
                                transition_weights)


def make_space(theta=0.5):
    clf = SameLabelPairClassifier()
    emb = WLHashEmbedder()
    return EditSpace(clf, emb, alphabet=("C", "N", "O"), neighbor_cap=20_000)


REJECT_INPUTS = [
    LabeledGraph.build("CN", [(0, 1)]),
    LabeledGraph.build("CO", [(0, 1)]),
    LabeledGraph.build("NO", [(0, 1)]),
]


def small_cfg(**kw):
    base = dict(theta=0.5, k=3, steps=120, teleport_prob=0.05, seed=7)
    base.update(kw)
    return WalkConfig(**base)


class TestWalkConfig:
    def test_default_radius_is_three_halves_theta(self):
        cfg = WalkConfig(theta=0.2)
        assert cfg.max_radius == pytest.approx(0.3)

    @pytest.mark.parametrize("kw", [dict(k=0), dict(steps=0), dict(theta=0.0),
                                    dict(teleport_prob=0.0),
                                    dict(teleport_prob=1.0)])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            small_cfg(**kw)


class TestTransitionWeights:
    def test_uniform_case(self):
        w = transition_weights(np.array([1.0, 1.0]), np.array([1.0, 1.0]))
        assert np.allclose(w, [0.5, 0.5])

    def test_visit_reinforcement(self):
        # p=(1, 0.5), visits=(0, 1): weights 1*1 and 0.5*2 tie at 0.5 each
        w = transition_weights(np.array([1.0, 0.5]), np.array([1.0, 2.0]))
        assert np.allclose(w, [0.5, 0.5])

    def test_normalization_tolerance(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            p = rng.random(17)
            m = rng.integers(1, 50, size=17).astype(float)
            assert abs(transition_weights(p, m).sum() - 1.0) <= 1e-12

    def test_all_zero_raises(self):
        with pytest.raises(ValueError):
            transition_weights(np.zeros(3), np.ones(3))


class TestTeleportDistribution:
    def test_symbolic_fixture(self):
        got = teleport_distribution(np.array([0.0, 0.0, 1.0]))
        denom = 2.0 + math.exp(-1.0)
        assert np.allclose(got, [1 / denom, 1 / denom, math.exp(-1.0) / denom],
                           atol=1e-12)

    def test_uniform_when_counts_equal(self):
        assert np.allclose(teleport_distribution(np.array([4.0, 4.0])),
                           [0.5, 0.5])

    def test_shift_invariance(self):
        t = np.array([3.0, 5.0, 9.0])
        assert np.allclose(teleport_distribution(t),
                           teleport_distribution(t + 100.0))


class TestEditSpace:
    def test_node_key_and_embedding(self):
        space = make_space()
        g = REJECT_INPUTS[0]
        node = space.node(g)
        from graphrecourse.canonical import canonical_key
        assert node.key == canonical_key(g)
        assert np.allclose(node.z, space.embedder.embed(g))

    def test_isomorphic_graphs_share_node(self):
        space = make_space()
        g = LabeledGraph.build("CN", [(0, 1)])
        h = LabeledGraph.build("NC", [(0, 1)])
        assert space.node(g) is space.node(h)

    def test_neighborhood_matches_edit_enumeration(self):
        space = make_space()
        g = REJECT_INPUTS[0]
        nodes, zs = space.neighborhood(space.node(g))
        expected = edit_neighbor_items(g, ("C", "N", "O"))
        assert [n.key for n in nodes] == [k for k, _ in expected]
        assert zs.shape == (len(nodes), 64)

    def test_probs_are_lazy_then_correct(self):
        space = make_space()
        node = space.node(REJECT_INPUTS[0])
        nodes, _ = space.neighborhood(node)
        assert any(n.p is None for n in nodes)
        ps = space.neighborhood_probs(node)
        clf = space.classifier
        assert list(ps) == [clf.predict(n.graph).p_accept for n in nodes]


class TestTransitions:
    def test_lead_respects_radius(self):
        space = make_space()
        node = space.node(REJECT_INPUTS[0])
        rng = np.random.default_rng(0)
        assert lead_transition(space, {}, node, node.z, 1e-9, rng) is None

    def test_lead_moves_to_accepting_neighbor(self):
        space = make_space()
        node = space.node(REJECT_INPUTS[0])
        rng = np.random.default_rng(0)
        nxt = lead_transition(space, {}, node, node.z, 10.0, rng)
        assert nxt is not None
        assert space.prob(nxt) > 0.5   # weights vanish on reject neighbors

    def test_follower_stays_on_zero_lead_vector(self):
        space = make_space()
        node = space.node(REJECT_INPUTS[0])
        out = follower_transition(space, node, node.z,
                                  np.zeros(64), max_radius=10.0)
        assert out is node

    def test_follower_chases_lead_displacement(self):
        space = make_space()
        node = space.node(REJECT_INPUTS[0])
        nodes, zs = space.neighborhood(node)
        target = nodes[5]
        out = follower_transition(space, node, node.z,
                                  target.z - node.z, max_radius=10.0)
        assert np.linalg.norm(out.z - target.z) <= min(
            float(np.linalg.norm(n.z - target.z)) for n in nodes + [node])


class TestRunVrrw:
    def run(self, cfg=None, inputs=None):
        cfg = cfg or small_cfg()
        clf = SameLabelPairClassifier()
        emb = WLHashEmbedder()
        return run_vrrw(inputs or REJECT_INPUTS, clf, emb, cfg)

    def test_deterministic_under_seed(self):
        r1, r2 = self.run(), self.run()
        assert r1.candidates.keys() == r2.candidates.keys()
        assert r1.visit_counts == r2.visit_counts
        assert np.array_equal(r1.teleports, r2.teleports)

    def test_candidate_validity(self):
        clf = SameLabelPairClassifier()
        res = self.run()
        for g in res.candidates.values():
            assert clf.predict(g).p_accept > 0.5

    def test_visit_increments_are_k_per_step(self):
        cfg = small_cfg()
        res = self.run(cfg)
        assert res.stats.visit_increments == cfg.steps * cfg.k
        assert sum(res.visit_counts.values()) <= res.stats.visit_increments

    def test_radius_cap_on_candidates(self):
        cfg = small_cfg()
        emb = WLHashEmbedder()
        res = self.run(cfg)
        starts = np.stack([emb.embed(g) for g in REJECT_INPUTS])
        for g in res.candidates.values():
            d = np.linalg.norm(starts - emb.embed(g), axis=1)
            assert float(d.min()) <= cfg.max_radius + 1e-9

    def test_teleport_counts_cover_all_heads(self):
        cfg = small_cfg()
        res = self.run(cfg)
        assert res.teleports.sum() == cfg.k * (1 + res.stats.teleport_steps +
                                               res.stats.forced_teleports)

    def test_accepted_inputs_dropped_with_warning(self):
        accepted = LabeledGraph.build("CC", [(0, 1)])
        with pytest.warns(UserWarning):
            res = self.run(inputs=[accepted] + REJECT_INPUTS)
        assert len(res.teleports) == len(REJECT_INPUTS)

    def test_all_inputs_accepted_gives_empty_result(self):
        accepted = LabeledGraph.build("CC", [(0, 1)])
        with pytest.warns(UserWarning):
            res = self.run(inputs=[accepted])
        assert res.candidates == {} and res.visit_counts == {}

    def test_checkpoint_resume_matches_straight_run(self, tmp_path):
        path = str(tmp_path / "walk.json")
        clf = SameLabelPairClassifier()
        straight = run_vrrw(REJECT_INPUTS, clf, WLHashEmbedder(),
                            small_cfg(steps=80))
        run_vrrw(REJECT_INPUTS, clf, WLHashEmbedder(), small_cfg(steps=40),
                 checkpoint_path=path, checkpoint_interval=40)
        resumed = run_vrrw(REJECT_INPUTS, clf, WLHashEmbedder(),
                           small_cfg(steps=80), checkpoint_path=path)
        assert resumed.visit_counts == straight.visit_counts
        assert resumed.candidates.keys() == straight.candidates.keys()
        assert np.array_equal(resumed.teleports, straight.teleports)


class TestTopCandidates:
    def make_result(self):
        g = LabeledGraph.build("CC")
        return WalkResult(
            candidates={b"a": g, b"b": g, b"c": g},
            visit_counts={b"a": 5, b"b": 9, b"c": 5},
            accept_probs={b"a": 1.0, b"b": 1.0, b"c": 1.0},
            teleports=np.zeros(1),
        )

    def test_orders_by_visits_then_key(self):
        res = self.make_result()
        assert list(top_candidates(res, 3)) == [b"b", b"a", b"c"]

    def test_truncates(self):
        assert list(top_candidates(self.make_result(), 1)) == [b"b"]

    def test_rejects_nonpositive_n(self):
        with pytest.raises(ValueError):
            top_candidates(self.make_result(), 0)
