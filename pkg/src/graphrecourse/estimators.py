"""Estimator-style front doors, sklearn get_params/set_params compatible."""

from __future__ import annotations

from sklearn.base import BaseEstimator

from . import recourse as rc
from .embedding import WLHashEmbedder
from .graphs import LabeledGraph
from .pipeline import baseline_local_rw as _baseline
from .walk import WalkConfig, run_vrrw, top_candidates


def check_graphs(X) -> list[LabeledGraph]:
    """Validate an iterable of LabeledGraph (or serialized text) inputs."""
    out = []
    for i, g in enumerate(X):
        if isinstance(g, str):
            g = LabeledGraph.from_text(g)
        if not isinstance(g, LabeledGraph):
            raise TypeError(f"element {i} is {type(g).__name__}, "
                            "expected LabeledGraph or its text serialization")
        out.append(g)
    if not out:
        raise ValueError("empty input graph collection")
    return out


class CommonRecourseExplainer(BaseEstimator):
    """Global common-recourse explanation for a binary graph classifier.

    fit(X) runs the multi-head reinforced walk over edit space around the
    reject-classified graphs in X, clusters the resulting recourse vectors,
    and greedily selects a coverage-maximizing summary.

    Attributes after fit: ``summary_``, ``clusters_``, ``candidates_``,
    ``pool_``, ``coverage_``, ``cost_``.
    """

    def __init__(self, classifier=None, embedder=None, theta=0.1, delta=0.02,
                 n_heads=5, n_steps=50_000, teleport_prob=0.05, budget=100,
                 top_n=100_000, cf_budget=None, seed=0):
        self.classifier = classifier
        self.embedder = embedder
        self.theta = theta
        self.delta = delta
        self.n_heads = n_heads
        self.n_steps = n_steps
        self.teleport_prob = teleport_prob
        self.budget = budget
        self.top_n = top_n
        self.cf_budget = cf_budget
        self.seed = seed

    def fit(self, X, y=None):
        graphs = check_graphs(X)
        if self.classifier is None:
            raise ValueError("a classifier instance is required")
        embedder = self.embedder if self.embedder is not None else WLHashEmbedder()
        inputs = [g for g in graphs if not self.classifier.predict(g).accept]
        if not inputs:
            raise ValueError("no reject-classified graphs to explain")
        cfg = WalkConfig(theta=self.theta, k=self.n_heads, steps=self.n_steps,
                         teleport_prob=self.teleport_prob, seed=self.seed)
        result = run_vrrw(inputs, self.classifier, embedder, cfg)
        cands = top_candidates(result, self.top_n) if result.candidates else {}
        if self.cf_budget is not None and len(cands) > self.cf_budget:
            kept = rc.fc_filter_nearest(cands, inputs, embedder)
            cands = {k: cands[k] for k in kept[: self.cf_budget]}
        self.inputs_ = inputs
        self.candidates_ = cands
        self.pool_ = rc.build_pool(inputs, cands, embedder, self.theta)
        self.clusters_ = rc.cluster_recourse(self.pool_, self.delta) \
            if len(self.pool_) else []
        # cluster_recourse already recomputed covered_inputs against pool_
        self.summary_ = rc.greedy_select(self.clusters_, self.budget,
                                         delta=self.delta, theta=self.theta,
                                         n_inputs=self.pool_.n_inputs)
        self.coverage_ = self.summary_.coverage
        self.cost_ = self.summary_.cost
        return self

    def transform(self, X=None):
        """The selected common recourse centers as a 2-D array."""
        import numpy as np

        self._check_fitted()
        if not self.summary_.selected:
            dim = (self.embedder or WLHashEmbedder()).dim
            return np.zeros((0, dim))
        return np.stack([r.center for r in self.summary_.selected])

    def _check_fitted(self):
        if not hasattr(self, "summary_"):
            raise RuntimeError("call fit before using the explainer")


class LocalRandomWalkExplainer(BaseEstimator):
    """Baseline: an unreinforced walk per input, keeping the closest
    accept-classified graph, then the same clustering and selection."""

    def __init__(self, classifier=None, embedder=None, theta=0.1, delta=0.02,
                 steps_per_input=100, teleport_prob=0.05, budget=100, seed=0):
        self.classifier = classifier
        self.embedder = embedder
        self.theta = theta
        self.delta = delta
        self.steps_per_input = steps_per_input
        self.teleport_prob = teleport_prob
        self.budget = budget
        self.seed = seed

    def fit(self, X, y=None):
        from .pipeline import RunConfig

        graphs = check_graphs(X)
        if self.classifier is None:
            raise ValueError("a classifier instance is required")
        inputs = [g for g in graphs if not self.classifier.predict(g).accept]
        if not inputs:
            raise ValueError("no reject-classified graphs to explain")
        cfg = RunConfig(theta=self.theta, delta=self.delta, budget=self.budget,
                        seed=self.seed, teleport_prob=self.teleport_prob,
                        baseline_steps_per_input=self.steps_per_input)
        art = _baseline(cfg, classifier=self.classifier,
                        embedder=self.embedder or WLHashEmbedder(),
                        inputs=inputs)
        self.summary_ = art.summary
        self.candidates_ = art.candidates
        self.coverage_ = art.summary.coverage
        self.cost_ = art.summary.cost
        return self
