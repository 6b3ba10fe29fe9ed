import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphrecourse.embedding import RecourseVector, WLHashEmbedder
from graphrecourse.graphs import LabeledGraph
from graphrecourse.recourse import (CommonRecourse, RecoursePool,
                                    SubsetCapError, brute_force_best_R,
                                    cluster_recourse, cost,
                                    counterfactual_set_coverage, coverage,
                                    fc_filter_nearest, fc_objective,
                                    greedy_select, randomized_greedy_fc,
                                    two_budget_two_cover)


def rv(vec, source=0, target=b"t"):
    return RecourseVector(vec=np.asarray(vec, dtype=float), source=source,
                          target=target)


def pool_of(vectors, n_inputs=None):
    n = n_inputs if n_inputs is not None else (
        max((v.source for v in vectors), default=-1) + 1)
    return RecoursePool(vectors, n_inputs=n)


def cr(center, covered):
    return CommonRecourse(center=np.asarray(center, dtype=float), members=(),
                          covered_inputs=frozenset(covered))


class TestRecoursePool:
    def test_covered_by_closed_ball(self):
        p = pool_of([rv([0.0, 0.0], 0), rv([1.0, 0.0], 1)], 2)
        assert p.covered_by(np.array([0.0, 0.0]), 1.0) == {0, 1}
        assert p.covered_by(np.array([0.0, 0.0]), 0.5) == {0}

    def test_restrict_targets(self):
        p = pool_of([rv([0.0], 0, b"a"), rv([1.0], 1, b"b")], 2)
        sub = p.restrict_targets({b"b"})
        assert len(sub) == 1 and sub.n_inputs == 2
        assert sub.vectors[0].target == b"b"

    def test_empty_pool(self):
        p = pool_of([], 3)
        assert p.covered_by(np.zeros(2), 1.0) == frozenset()


class TestClusterRecourse:
    def test_identical_vectors_one_cluster(self):
        p = pool_of([rv([0.3, 0.4], i) for i in range(4)])
        out = cluster_recourse(p, delta=0.01)
        assert len(out) == 1
        assert np.allclose(out[0].center, [0.3, 0.4])
        assert out[0].covered_inputs == {0, 1, 2, 3}

    def test_far_vectors_become_singletons(self):
        p = pool_of([rv([0.0, 0.0], 0), rv([0.3, 0.0], 1)])
        out = cluster_recourse(p, delta=0.1)   # distance 3*delta
        assert len(out) == 2
        assert all(len(c.members) == 1 for c in out)

    def test_coverage_recomputed_from_centroid(self):
        # Two members at +/- delta around 0: centroid 0 covers both strictly.
        p = pool_of([rv([-0.01], 0), rv([0.01], 1)])
        out = cluster_recourse(p, delta=0.025)
        assert len(out) == 1
        assert out[0].covered_inputs == {0, 1}

    def test_chain_merges_through_density(self):
        # 0 -- 0.02 -- 0.04: consecutive within delta, ends not directly.
        p = pool_of([rv([0.0], 0), rv([0.02], 1), rv([0.04], 2)])
        out = cluster_recourse(p, delta=0.02)
        assert len(out) == 1

    def test_against_reachability_oracle(self):
        """With density minimum 2, clusters are exactly the connected
        components of the <=delta graph; isolated points are noise."""
        for seed in range(8):
            rng = np.random.default_rng(seed)
            pts = rng.random((120, 2))
            delta = 0.07
            p = pool_of([rv(pt, i) for i, pt in enumerate(pts)])
            out = cluster_recourse(p, delta=delta)
            parent = list(range(len(pts)))

            def find(a):
                while parent[a] != a:
                    parent[a] = parent[parent[a]]
                    a = parent[a]
                return a

            for i in range(len(pts)):
                for j in range(i + 1, len(pts)):
                    if np.linalg.norm(pts[i] - pts[j]) <= delta:
                        parent[find(i)] = find(j)
            comp = {}
            for i in range(len(pts)):
                comp.setdefault(find(i), []).append(i)
            # one cluster per component (noise singletons stand alone), and
            # each cluster center is its component's centroid
            assert len(out) == len(comp), seed
            centroids = sorted(tuple(np.mean(pts[m], axis=0))
                               for m in comp.values())
            centers = sorted(tuple(c.center) for c in out)
            assert np.allclose(centroids, centers), seed


class TestCoverageAndCost:
    def test_empty_selection(self):
        p = pool_of([rv([0.0], 0)], 1)
        assert coverage([], p, 0.1) == 0.0
        assert cost([], p, 0.1) == 0.0

    def test_exact_recourse_covers_its_input(self):
        p = pool_of([rv([0.3, 0.4], 0)], 1)
        sel = [cr([0.3, 0.4], [0])]
        assert coverage(sel, p, 1e-9) == 1.0

    def test_cost_takes_min_norm_per_input(self):
        p = pool_of([rv([0.3, 0.0], 0), rv([0.5, 0.0], 0)], 1)
        sel = [cr([0.3, 0.0], [0]), cr([0.5, 0.0], [0])]
        assert cost(sel, p, 1e-9) == pytest.approx(0.3)

    def test_cost_sums_over_covered_inputs(self):
        p = pool_of([rv([0.2, 0.0], 0), rv([0.0, 0.4], 1)], 2)
        sel = [cr([0.2, 0.0], [0]), cr([0.0, 0.4], [1])]
        assert cost(sel, p, 1e-9) == pytest.approx(0.6)


def random_instance(seed, n_inputs=12, n_clusters=None, r_max=4):
    r = random.Random(seed)
    n_clusters = n_clusters or r.randint(1, 12)
    clusters = []
    for _ in range(n_clusters):
        size = r.randint(0, n_inputs)
        clusters.append(cr([r.random()], r.sample(range(n_inputs), size)))
    return clusters, r.randint(1, r_max), n_inputs


class TestGreedySelect:
    def test_single_cluster(self):
        c = cr([0.1], [0, 1])
        s = greedy_select([c], budget=3, n_inputs=2)
        assert s.selected == [c] and s.coverage == 1.0

    def test_stops_when_no_gain(self):
        clusters = [cr([0.1], [0, 1]), cr([0.2], [0])]
        s = greedy_select(clusters, budget=2, n_inputs=2)
        assert len(s.selected) == 1
        assert s.gain_sequence == [2]

    def test_tie_breaks_by_cost(self):
        cheap, dear = cr([0.1], [0]), cr([0.9], [1])
        s = greedy_select([dear, cheap], budget=1, n_inputs=2)
        assert s.selected == [cheap]

    def test_budget_respected(self):
        clusters = [cr([0.1], [i]) for i in range(5)]
        s = greedy_select(clusters, budget=2, n_inputs=5)
        assert len(s.selected) == 2 and s.coverage == pytest.approx(2 / 5)

    def test_against_brute_force_ratio(self):
        bound = 1 - 1 / math.e
        for seed in range(120):
            clusters, budget, n = random_instance(seed)
            s = greedy_select(clusters, budget, n_inputs=n)
            _, opt = brute_force_best_R(clusters, budget, n_inputs=n)
            assert len(s.covered_inputs) >= bound * opt - 1e-12, seed

    def test_summary_serialization_is_stable(self):
        clusters = [cr([0.1, 0.2], [0])]
        s1 = greedy_select(clusters, 1, n_inputs=1, theta=0.1, delta=0.02)
        s2 = greedy_select(clusters, 1, n_inputs=1, theta=0.1, delta=0.02)
        assert s1.to_json() == s2.to_json()


class TestBruteForce:
    def test_exhaustive_small(self):
        clusters = [cr([0.0], [0, 1]), cr([0.0], [2]), cr([0.0], [1, 2, 3])]
        picks, covered = brute_force_best_R(clusters, 2, n_inputs=4)
        assert covered == 4
        assert picks == (0, 2)   # the unique optimum

    def test_tie_breaks_lexicographically(self):
        clusters = [cr([0.0], [0, 1]), cr([0.0], [2]), cr([0.0], [1, 2])]
        picks, covered = brute_force_best_R(clusters, 2, n_inputs=3)
        assert covered == 3
        assert picks == (0, 1)   # both (0,1) and (0,2) cover all three

    def test_cap(self):
        clusters = [cr([0.0], [i]) for i in range(30)]
        with pytest.raises(SubsetCapError):
            brute_force_best_R(clusters, 15, n_inputs=30, subset_cap=10)


class TestCoverageProperties:
    sets = st.lists(
        st.frozensets(st.integers(min_value=0, max_value=9), max_size=6),
        min_size=1, max_size=8)

    @given(sets, st.data())
    @settings(max_examples=120, deadline=None)
    def test_monotone(self, family, data):
        clusters = [cr([0.0], s) for s in family]
        cut = data.draw(st.integers(min_value=0, max_value=len(clusters)))
        small = clusters[:cut]
        big = clusters
        cov_small = len(frozenset().union(*[c.covered_inputs for c in small],
                                          frozenset()))
        cov_big = len(frozenset().union(*[c.covered_inputs for c in big],
                                        frozenset()))
        assert cov_small <= cov_big

    @given(sets, st.frozensets(st.integers(min_value=0, max_value=9),
                               max_size=6), st.data())
    @settings(max_examples=150, deadline=None)
    def test_submodular_gains(self, family, extra, data):
        cut = data.draw(st.integers(min_value=0, max_value=len(family)))
        a = family[:cut]
        b = family
        union_a = frozenset().union(*a, frozenset())
        union_b = frozenset().union(*b, frozenset())
        gain_a = len(extra - union_a)
        gain_b = len(extra - union_b)
        assert gain_a >= gain_b


class TestFcPath:
    def test_filter_nearest_keeps_per_input_best(self):
        emb = WLHashEmbedder()
        inputs = [LabeledGraph.build("CN", [(0, 1)]),
                  LabeledGraph.build("NO", [(0, 1)])]
        cands = {}
        for text in ("CC", "NN", "OO"):
            g = LabeledGraph.build(text, [(0, 1)])
            from graphrecourse.canonical import canonical_key
            cands[canonical_key(g)] = g
        kept = fc_filter_nearest(cands, inputs, emb)
        assert 1 <= len(kept) <= 2
        assert kept == sorted(kept)
        for k in kept:
            assert k in cands

    def test_filter_empty(self):
        assert fc_filter_nearest({}, [], WLHashEmbedder()) == []

    def test_fc_objective_empty(self):
        p = pool_of([rv([0.0], 0, b"a")], 1)
        assert fc_objective({b"nope"}, p, 0.1, 1) == (0, "empty")

    def test_fc_objective_exhaustive(self):
        p = pool_of([rv([0.0], 0, b"a"), rv([0.0], 1, b"a")], 2)
        count, how = fc_objective({b"a"}, p, 0.1, 1)
        assert (count, how) == (2, "exhaustive")

    def test_fc_objective_greedy_fallback(self):
        vecs = [rv([float(i)], i, b"a") for i in range(9)]
        p = pool_of(vecs, 9)
        count, how = fc_objective({b"a"}, p, 0.1, 5, subset_cap=3)
        assert how == "greedy" and count == 5


class TestRandomizedGreedy:
    def evaluate_factory(self, universe):
        def evaluate(targets):
            return len(frozenset().union(*(universe[t] for t in targets),
                                         frozenset()))
        return evaluate

    def test_small_pool_raises(self):
        with pytest.raises(ValueError):
            randomized_greedy_fc([b"a"], lambda s: 0, T=2, R=1,
                                 rng=np.random.default_rng(0))

    def test_selects_T_distinct(self):
        universe = {b"a": {1}, b"b": {2}, b"c": {3}}
        res = randomized_greedy_fc(sorted(universe), self.evaluate_factory(universe),
                                   T=2, R=1, rng=np.random.default_rng(0))
        assert len(set(res.selected)) == 2
        assert res.objective == 2
        assert res.c1_held

    def test_c1_fails_on_duplicate_value(self):
        universe = {b"a": {1}, b"b": {1}, b"c": {1}}
        res = randomized_greedy_fc(sorted(universe), self.evaluate_factory(universe),
                                   T=2, R=1, rng=np.random.default_rng(0))
        assert not res.c1_held

    def test_mean_matches_guarantee_on_small_instance(self):
        universe = {b"a": {1, 2}, b"b": {2, 3}, b"c": {4}, b"d": {1}}
        evaluate = self.evaluate_factory(universe)
        R = 2
        opt = max(evaluate(frozenset(s)) for s in
                  __import__("itertools").combinations(universe, 2))
        vals = [randomized_greedy_fc(sorted(universe), evaluate, T=2, R=R,
                                     rng=np.random.default_rng(seed)).objective
                for seed in range(100)]
        mean = np.mean(vals)
        se = np.std(vals, ddof=1) / math.sqrt(len(vals))
        assert mean >= (1 - math.exp(-1 / R)) * opt - 3 * se


class TestTwoBudgetTwoCover:
    def test_exhaustive_exact(self):
        f1 = [frozenset({1, 2}), frozenset({3})]
        f2 = [frozenset({1, 2}), frozenset({4})]
        p1, p2, obj, exact = two_budget_two_cover(f1, f2, 1, 1)
        assert exact
        assert obj == 2
        u1 = frozenset().union(*(f1[i] for i in p1))
        u2 = frozenset().union(*(f2[i] for i in p2))
        assert len(u1 & u2) == obj

    def test_zero_budget(self):
        assert two_budget_two_cover([frozenset({1})], [frozenset({1})], 0, 1) \
            == ((), (), 0, True)

    def test_greedy_flagged_inexact(self):
        f = [frozenset({i}) for i in range(15)]
        _, _, obj, exact = two_budget_two_cover(f, f, 2, 2, exhaustive_cap=5)
        assert not exact and obj >= 1

    def test_greedy_matches_exhaustive_often(self):
        r = random.Random(0)
        for _ in range(20):
            f1 = [frozenset(r.sample(range(8), r.randint(1, 4)))
                  for _ in range(4)]
            f2 = [frozenset(r.sample(range(8), r.randint(1, 4)))
                  for _ in range(4)]
            _, _, opt, exact = two_budget_two_cover(f1, f2, 2, 2)
            assert exact
            _, _, approx, _ = two_budget_two_cover(f1, f2, 2, 2,
                                                   exhaustive_cap=0)
            assert approx <= opt


class TestCounterfactualCoverage:
    def test_empty_cases(self):
        emb = WLHashEmbedder()
        g = LabeledGraph.build("CN", [(0, 1)])
        assert counterfactual_set_coverage([], [g], emb, 0.1) == 0.0
        assert counterfactual_set_coverage([g], [], emb, 0.1) == 0.0

    def test_exact_copy_covers(self):
        emb = WLHashEmbedder()
        g = LabeledGraph.build("CN", [(0, 1)])
        other = LabeledGraph.build("OOOO")
        assert counterfactual_set_coverage([g], [g, other], emb, 1e-6) \
            == pytest.approx(1 / 2)
