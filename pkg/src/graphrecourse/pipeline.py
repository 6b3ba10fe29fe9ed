"""End-to-end explanation pipelines and report emission."""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import recourse as rc
from .classifiers import ForbiddenMotifClassifier, SameLabelPairClassifier, \
    TriangleThresholdClassifier
from .datasets import Dataset, NITRO_MOTIF, load_tu, reject_subset, \
    synthetic_motif_corpus
from .embedding import WLHashEmbedder
from .graphs import LabeledGraph
from .walk import EditSpace, WalkConfig, run_vrrw, top_candidates

TOP_N_DEFAULT_CAP = 100_000


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Declarative configuration of one pipeline run."""

    dataset: dict = field(default_factory=dict)
    classifier: dict = field(default_factory=lambda: {"name": "forbidden_motif"})
    embedder: dict = field(default_factory=lambda: {"name": "wl_hash"})
    theta: float = 0.1
    delta: float = 0.02
    k: int = 5
    steps: int = 50_000
    teleport_prob: float = 0.05
    budget: int = 100                  # R, number of common recourse
    top_n: int | None = None           # candidates entering clustering
    cf_budget: int | None = None       # T, for the FC path
    baseline_steps_per_input: int | None = None
    neighborhood_cache: int | None = None
    seed: int = 0
    output_dir: str | None = None
    checkpoint_interval: int | None = None

    def __post_init__(self):
        if not self.theta > 0:
            raise ConfigError("theta must be > 0")
        if not self.delta > 0:
            raise ConfigError("delta must be > 0")
        if self.budget < 1:
            raise ConfigError("budget R must be >= 1")
        if not 0 < self.teleport_prob < 1:
            raise ConfigError("teleport probability must be in (0, 1)")
        if self.cf_budget is not None and self.cf_budget < 1:
            raise ConfigError("counterfactual budget T must be >= 1")

    @staticmethod
    def from_file(path: str, **overrides) -> "RunConfig":
        with open(path) as fh:
            doc = json.load(fh)
        doc.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**doc)

    def resolved(self) -> dict:
        return asdict(self)


def build_classifier(spec: dict):
    if "bridge_command" in spec:
        from .bridgeclient import BridgeClassifier

        return BridgeClassifier(spec["bridge_command"])
    name = spec.get("name")
    if name == "same_label_pair":
        return SameLabelPairClassifier(ignore=frozenset(spec.get("ignore", ["_"])))
    if name == "forbidden_motif":
        motif = spec.get("motif")
        motif = LabeledGraph.from_text(motif) if motif else NITRO_MOTIF
        return ForbiddenMotifClassifier(motif)
    if name == "triangle_threshold":
        return TriangleThresholdClassifier(spec.get("min_triangles", 1))
    raise ConfigError(f"unknown classifier spec {spec!r}")


def build_embedder(spec: dict):
    if "bridge_command" in spec:
        from .bridgeclient import BridgeEmbedder

        return BridgeEmbedder(spec["bridge_command"])
    if spec.get("name", "wl_hash") == "wl_hash":
        kwargs = {k: spec[k] for k in ("dim", "rounds", "seed", "scale") if k in spec}
        return WLHashEmbedder(**kwargs)
    raise ConfigError(f"unknown embedder spec {spec!r}")


def load_inputs(cfg: RunConfig, classifier) -> list[LabeledGraph]:
    spec = cfg.dataset
    if "tu_dir" in spec:
        ds = load_tu(spec["tu_dir"], spec.get("name"))
    elif "synthetic_motif" in spec:
        params = spec["synthetic_motif"] or {}
        ds = synthetic_motif_corpus(**params)
    elif "graphs" in spec:
        graphs = [LabeledGraph.from_text(t) for t in spec["graphs"]]
        ds = Dataset(graphs=graphs, class_labels=spec.get(
            "class_labels", [0] * len(graphs)))
    else:
        raise ConfigError(f"unrecognized dataset spec {spec!r}")
    if spec.get("reject_by") == "label":
        return reject_subset(ds)
    return reject_subset(ds, classifier)


@dataclass
class RunArtifacts:
    summary: rc.Summary
    report: dict
    inputs: list[LabeledGraph]
    candidates: dict[bytes, LabeledGraph]
    pool: rc.RecoursePool
    clusters: list[rc.CommonRecourse]


def _walk_config(cfg: RunConfig, inputs) -> WalkConfig:
    alphabet = tuple(sorted({lab for g in inputs for lab in g.labels}))
    kw = {}
    if cfg.neighborhood_cache is not None:
        kw["neighborhood_cache_size"] = cfg.neighborhood_cache
    return WalkConfig(theta=cfg.theta, k=cfg.k, steps=cfg.steps,
                      teleport_prob=cfg.teleport_prob, seed=cfg.seed,
                      alphabet=alphabet, **kw)


def explain_fcr(cfg: RunConfig, space: EditSpace | None = None,
                classifier=None, embedder=None, inputs=None) -> RunArtifacts:
    """Walk, keep the top-visited candidates, cluster recourse, select greedily."""
    classifier = classifier or build_classifier(cfg.classifier)
    embedder = embedder or build_embedder(cfg.embedder)
    inputs = inputs if inputs is not None else load_inputs(cfg, classifier)
    wcfg = _walk_config(cfg, inputs)
    checkpoint = None
    if cfg.output_dir and cfg.checkpoint_interval:
        os.makedirs(cfg.output_dir, exist_ok=True)
        checkpoint = os.path.join(cfg.output_dir, "walk-checkpoint.json")
    result = run_vrrw(inputs, classifier, embedder, wcfg, space=space,
                      checkpoint_path=checkpoint,
                      checkpoint_interval=cfg.checkpoint_interval)
    n = cfg.top_n if cfg.top_n is not None else TOP_N_DEFAULT_CAP
    cands = top_candidates(result, max(1, n)) if result.candidates else {}
    return _summarize(cfg, "explain-fcr", inputs, cands, embedder,
                      walk_stats=result.stats)


def explain_fc(cfg: RunConfig, space: EditSpace | None = None,
               classifier=None, embedder=None, inputs=None) -> RunArtifacts:
    """FCR pipeline with the counterfactual budget T enforced before clustering.

    Candidate reduction runs only when the candidate set exceeds T: first the
    per-input nearest filter, then (if still above T) the T candidates of
    smallest recourse norm.  With T >= the candidate count the path is
    byte-identical to explain_fcr on the same seed.
    """
    classifier = classifier or build_classifier(cfg.classifier)
    embedder = embedder or build_embedder(cfg.embedder)
    inputs = inputs if inputs is not None else load_inputs(cfg, classifier)
    wcfg = _walk_config(cfg, inputs)
    result = run_vrrw(inputs, classifier, embedder, wcfg, space=space)
    n = cfg.top_n if cfg.top_n is not None else TOP_N_DEFAULT_CAP
    cands = top_candidates(result, max(1, n)) if result.candidates else {}
    t_budget = cfg.cf_budget if cfg.cf_budget is not None else len(inputs)
    if len(cands) > t_budget:
        kept = rc.fc_filter_nearest(cands, inputs, embedder)
        cands = {k: cands[k] for k in kept}
        if len(cands) > t_budget:
            ranked = sorted(cands, key=lambda key: (
                min(float(np.linalg.norm(embedder.embed(cands[key]) -
                                         embedder.embed(g))) for g in inputs),
                key))
            cands = {k: cands[k] for k in sorted(ranked[:t_budget])}
    art = _summarize(cfg, "explain-fc", inputs, cands, embedder,
                     walk_stats=result.stats)
    art.report["cf_budget"] = t_budget
    art.report["n_counterfactuals"] = len(cands)
    return art


def baseline_local_rw(cfg: RunConfig, classifier=None, embedder=None,
                      inputs=None) -> RunArtifacts:
    """Per-input plain random walks; the nearest accepted graph per input is
    the candidate set (one counterfactual per covered input)."""
    classifier = classifier or build_classifier(cfg.classifier)
    embedder = embedder or build_embedder(cfg.embedder)
    inputs = inputs if inputs is not None else load_inputs(cfg, classifier)
    alphabet = tuple(sorted({lab for g in inputs for lab in g.labels}))
    space = EditSpace(classifier, embedder, alphabet, neighbor_cap=20_000)
    rng = np.random.default_rng(cfg.seed)
    per_input = cfg.baseline_steps_per_input
    if per_input is None:
        per_input = max(1, cfg.steps // max(1, len(inputs)))
    max_radius = 1.5 * cfg.theta
    cands: dict[bytes, LabeledGraph] = {}
    vectors: list[rc.RecourseVector] = []
    for g_idx, g in enumerate(inputs):
        start = space.node(g)
        node = start
        best = None
        for _ in range(per_input):
            if rng.random() < cfg.teleport_prob:
                node = start
                continue
            nodes, zs = space.neighborhood(node)
            if not nodes:
                node = start
                continue
            mask = np.linalg.norm(zs - start.z, axis=1) <= max_radius
            idx = np.flatnonzero(mask)
            ps = space.neighborhood_probs(node)
            if idx.size == 0 or ps[idx].sum() <= 0:
                node = start
                continue
            probs = ps[idx] / ps[idx].sum()
            pick = int(np.searchsorted(np.cumsum(probs), rng.random(), "right"))
            node = nodes[int(idx[min(pick, idx.size - 1)])]
            if space.prob(node) > 0.5:
                d = float(np.linalg.norm(node.z - start.z))
                if d <= cfg.theta and (best is None or d < best[0]):
                    best = (d, node)
        if best is not None:
            cands[best[1].key] = best[1].graph
            vectors.append(rc.RecourseVector(
                vec=np.asarray(best[1].z - start.z, dtype=float),
                source=g_idx, target=best[1].key))
    # A local explainer produces one counterfactual per input; its recourse
    # pool holds only those pairs, never cross-input combinations.
    pool = rc.RecoursePool(vectors, n_inputs=len(inputs))
    return _summarize(cfg, "baseline-local-rw", inputs, cands, embedder,
                      pool=pool)


def _summarize(cfg: RunConfig, method: str, inputs, cands, embedder,
               walk_stats=None, pool: rc.RecoursePool | None = None,
               ) -> RunArtifacts:
    if pool is None:
        pool = rc.build_pool(inputs, cands, embedder, cfg.theta)
    clusters = rc.cluster_recourse(pool, cfg.delta) if len(pool) else []
    # cluster_recourse already recomputed covered_inputs against this exact
    # pool at this delta, so greedy can reuse them instead of rescanning
    summary = rc.greedy_select(clusters, cfg.budget, delta=cfg.delta,
                               theta=cfg.theta, n_inputs=pool.n_inputs)
    curve = _coverage_curve(summary, pool.n_inputs)
    report = {
        "method": method,
        "config": cfg.resolved(),
        "n_inputs": pool.n_inputs,
        "n_candidates": len(cands),
        "n_recourse_vectors": len(pool),
        "n_clusters": len(clusters),
        "summary": summary.to_dict(),
        "coverage_curve": curve,
    }
    if walk_stats is not None:
        report["walk_stats"] = asdict(walk_stats)
    art = RunArtifacts(summary=summary, report=report, inputs=inputs,
                       candidates=cands, pool=pool, clusters=clusters)
    if cfg.output_dir:
        write_report(art, cfg.output_dir)
    return art


def _coverage_curve(summary: rc.Summary, n_inputs: int) -> list[dict]:
    curve = []
    covered = 0
    for i, gain in enumerate(summary.gain_sequence, 1):
        covered += gain
        curve.append({"R": i, "coverage": covered / n_inputs if n_inputs else 0.0})
    return curve


def write_report(art: RunArtifacts, outdir: str) -> None:
    """summary.json + metrics.csv + per-recourse exemplar graph pairs.

    Bytes are a pure function of the run except the top-level timestamp.
    """
    os.makedirs(outdir, exist_ok=True)
    doc = dict(art.report)
    doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    with open(os.path.join(outdir, "summary.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(outdir, "metrics.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", "seed", "coverage", "cost", "n_candidates",
                    "n_clusters"])
        w.writerow([art.report["method"], art.report["config"]["seed"],
                    art.summary.coverage, art.summary.cost,
                    art.report["n_candidates"], art.report["n_clusters"]])
    with open(os.path.join(outdir, "coverage_curve.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["R", "coverage"])
        for row in art.report["coverage_curve"]:
            w.writerow([row["R"], row["coverage"]])
    exdir = os.path.join(outdir, "exemplars")
    os.makedirs(exdir, exist_ok=True)
    by_key = {k: g for k, g in art.candidates.items()}
    for ri, r in enumerate(art.summary.selected):
        if not r.members:
            continue
        m = r.members[0]
        pair_dir = os.path.join(exdir, f"recourse_{ri:03d}")
        os.makedirs(pair_dir, exist_ok=True)
        with open(os.path.join(pair_dir, "input.graph.txt"), "w") as fh:
            fh.write(art.inputs[m.source].to_text())
        cf = by_key.get(m.target)
        if cf is not None:
            with open(os.path.join(pair_dir, "counterfactual.graph.txt"), "w") as fh:
                fh.write(cf.to_text())


def eval_report(report_paths: list[str]) -> dict:
    """Merge run reports into one coverage/cost comparison table."""
    rows = []
    curves = {}
    for path in report_paths:
        with open(path) as fh:
            doc = json.load(fh)
        rows.append({
            "method": doc["method"],
            "seed": doc["config"]["seed"],
            "coverage": doc["summary"]["coverage"],
            "cost": doc["summary"]["cost"],
        })
        curves[f'{doc["method"]}#{doc["config"]["seed"]}'] = doc["coverage_curve"]
    return {"table": rows, "curves": curves}
