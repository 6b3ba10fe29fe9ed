"""Common-recourse construction and budgeted summary selection.

The pipeline here takes the (input graph, counterfactual) pairs produced by
the walk, clusters their embedding-space difference vectors at radius delta,
and greedily selects a coverage-maximizing subset of cluster centers.
Brute-force counterparts are provided for every selector so desk-scale
instances can be checked exactly.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .embedding import RecourseVector

BRUTE_FORCE_SUBSET_CAP = 2_000_000
CLUSTER_SIZE_CAP = 200_000


class ClusterSizeCapError(ValueError):
    pass


class SubsetCapError(ValueError):
    pass


@dataclass(frozen=True)
class CommonRecourse:
    """A representative center vector plus the recourse it summarizes."""

    center: np.ndarray
    members: tuple[RecourseVector, ...]
    covered_inputs: frozenset[int]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.center))


@dataclass
class Summary:
    selected: list[CommonRecourse]
    coverage: float
    cost: float
    theta: float
    delta: float
    covered_inputs: frozenset[int] = frozenset()
    gain_sequence: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "theta": self.theta,
            "delta": self.delta,
            "coverage": self.coverage,
            "cost": self.cost,
            "covered_inputs": sorted(self.covered_inputs),
            "gain_sequence": self.gain_sequence,
            "recourse": [
                {
                    "center": [float(x) for x in r.center],
                    "norm": r.norm,
                    "covered_inputs": sorted(r.covered_inputs),
                    "members": [
                        {"source": m.source, "target": m.target.hex()}
                        for m in r.members
                    ],
                }
                for r in self.selected
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class RecoursePool:
    """All admissible (input, counterfactual) recourse vectors for one run.

    Holds one row per pair; the number of inputs includes graphs no pair
    covers, so coverage fractions use the full input set.
    """

    def __init__(self, vectors: list[RecourseVector], n_inputs: int):
        self.vectors = list(vectors)
        self.n_inputs = n_inputs
        if vectors:
            self.matrix = np.stack([v.vec for v in vectors])
        else:
            self.matrix = np.zeros((0, 0))
        self.sources = np.array([v.source for v in vectors], dtype=int)

    def __len__(self) -> int:
        return len(self.vectors)

    def covered_by(self, center: np.ndarray, delta: float) -> frozenset[int]:
        """Inputs with at least one pair vector within delta of the center."""
        if not self.vectors:
            return frozenset()
        d = np.linalg.norm(self.matrix - center, axis=1)
        return frozenset(self.sources[d <= delta].tolist())

    def members_of(self, center: np.ndarray, delta: float) -> tuple[RecourseVector, ...]:
        if not self.vectors:
            return ()
        d = np.linalg.norm(self.matrix - center, axis=1)
        return tuple(v for v, ok in zip(self.vectors, d <= delta) if ok)

    def restrict_targets(self, targets: set[bytes]) -> "RecoursePool":
        """Pool limited to pairs whose counterfactual is in the given set."""
        return RecoursePool([v for v in self.vectors if v.target in targets],
                            self.n_inputs)


def cluster_recourse(pool: RecoursePool, delta: float, min_samples: int = 2,
                     size_cap: int = CLUSTER_SIZE_CAP) -> list[CommonRecourse]:
    """Density-based clustering of the pool's vectors at radius delta.

    Classic DBSCAN with eps=delta; noise points are kept as singleton
    clusters so no recourse is lost.  Each cluster's representative is the
    member centroid, and covered inputs are then recomputed strictly by the
    <= delta rule against the whole pool, so the coverage definition stays
    authoritative over the clustering heuristic.
    """
    n = len(pool)
    if n == 0:
        return []
    if n > size_cap:
        raise ClusterSizeCapError(f"{n} vectors exceeds clustering cap {size_cap}")
    # With min_samples=2 every non-isolated point is core, so DBSCAN reduces
    # to connected components of the <=delta pair graph; the sparse path
    # computes those from a KD-tree pair sweep instead of full distance rows.
    adj = None
    if min_samples == 2 and n > 512:
        labels, adj = _eps_components(pool.matrix, delta)
    else:
        labels = _dbscan(pool.matrix, eps=delta, min_samples=min_samples)
    clusters: dict[int, list[int]] = {}
    next_id = max(labels, default=-1) + 1
    for i, lab in enumerate(labels):
        if lab == -1:          # noise -> singleton cluster
            lab = next_id
            next_id += 1
        clusters.setdefault(lab, []).append(i)
    labs = sorted(clusters)
    centers = {lab: pool.matrix[clusters[lab]].mean(axis=0) for lab in labs}
    balls: dict[int, list[int]] = {}
    if adj is not None:
        multi = [lab for lab in labs if len(clusters[lab]) > 1]
        if multi:
            cmat = np.stack([centers[lab] for lab in multi])
            balls = dict(zip(multi, _ball_members(pool.matrix, cmat, delta)))
    out = []
    for lab in labs:
        center = centers[lab]
        if adj is not None:
            if lab in balls:
                mem = balls[lab]
            else:
                # singleton: the center is the vector itself, so its
                # <=delta ball is exactly its pair-graph neighborhood
                mem = sorted(adj[clusters[lab][0]] + [clusters[lab][0]])
            members = tuple(pool.vectors[j] for j in mem)
            covered = frozenset(int(pool.sources[j]) for j in mem)
        else:
            members = pool.members_of(center, delta)
            covered = pool.covered_by(center, delta)
        out.append(CommonRecourse(
            center=center, members=members, covered_inputs=covered,
        ))
    return out


def _ball_members(x: np.ndarray, centers: np.ndarray, delta: float,
                  block: int = 256) -> list[list[int]]:
    """Indices of x within <=delta of each center, ascending per center.

    Blocked Gram products find candidates; a direct norm recheck makes the
    membership decision identical to the row-by-row rule.
    """
    xn2 = np.einsum("ij,ij->i", x, x)
    thresh = (delta + 1e-7) ** 2
    out: list[list[int]] = []
    for c0 in range(0, len(centers), block):
        cb = centers[c0:c0 + block]
        d2 = (np.einsum("ij,ij->i", cb, cb)[:, None] + xn2[None, :]
              - 2.0 * (cb @ x.T))
        for r in range(len(cb)):
            cand = np.flatnonzero(d2[r] <= thresh)
            ok = np.linalg.norm(x[cand] - cb[r], axis=1) <= delta
            out.append(cand[ok].tolist())
    return out


def _eps_pairs(x: np.ndarray, eps: float, block: int = 1024) -> np.ndarray:
    """All index pairs (a < b) with ||x[a] - x[b]|| <= eps, exactly.

    Rows are sorted by norm so only the band with norm difference <= eps is
    examined (a consequence of the triangle inequality); within the band,
    blocked Gram products find candidates and a direct norm recheck makes
    the threshold decision identical to the naive rule.
    """
    n = len(x)
    norms = np.linalg.norm(x, axis=1)
    order = np.argsort(norms, kind="stable")
    xs = np.ascontiguousarray(x[order])
    ns = norms[order]
    out_a, out_b = [], []
    thresh = (eps + 1e-7) ** 2
    for i0 in range(0, n, block):
        i1 = min(i0 + block, n)
        jmax = int(np.searchsorted(ns, ns[i1 - 1] + eps + 1e-9, side="right"))
        xi = xs[i0:i1]
        n2i = ns[i0:i1, None] ** 2
        for j0 in range(i0, jmax, block * 8):
            j1 = min(j0 + block * 8, jmax)
            d2 = n2i + ns[j0:j1][None, :] ** 2 - 2.0 * (xi @ xs[j0:j1].T)
            cand = np.argwhere(d2 <= thresh)
            a = cand[:, 0] + i0
            b = cand[:, 1] + j0
            keep = b > a
            a, b = a[keep], b[keep]
            if len(a):
                ok = np.linalg.norm(xs[a] - xs[b], axis=1) <= eps
                out_a.append(order[a[ok]])
                out_b.append(order[b[ok]])
    if not out_a:
        return np.empty((0, 2), dtype=np.intp)
    aa = np.concatenate(out_a)
    bb = np.concatenate(out_b)
    return np.stack([np.minimum(aa, bb), np.maximum(aa, bb)], axis=1)


def _eps_components(x: np.ndarray, eps: float):
    """Connected components of the <=eps pair graph.

    Equivalent to _dbscan at min_samples=2: isolated points are noise (-1),
    every other point is core and clusters are the components.  Component
    ids follow the smallest member index, matching _dbscan's scan order.
    Also returns the adjacency lists of the pair graph.
    """
    n = len(x)
    pairs = _eps_pairs(x, eps)
    adj: list[list[int]] = [[] for _ in range(n)]
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in pairs:
        a, b = int(a), int(b)
        adj[a].append(b)
        adj[b].append(a)
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra
    labels = [-1] * n
    roots: dict[int, int] = {}
    for i in range(n):
        if not adj[i]:
            continue
        r = find(i)
        if r not in roots:
            roots[r] = len(roots)
        labels[i] = roots[r]
    return labels, adj


def _dbscan(x: np.ndarray, eps: float, min_samples: int) -> list[int]:
    """Plain DBSCAN over Euclidean distance; returns -1 for noise."""
    n = len(x)
    labels = [None] * n
    # neighbor lists once; quadratic but chunked to bound memory
    nbrs: list[np.ndarray] = []
    for i in range(n):
        d = np.linalg.norm(x - x[i], axis=1)
        nbrs.append(np.flatnonzero(d <= eps))
    core = [len(nbrs[i]) >= min_samples for i in range(n)]
    cluster = 0
    for i in range(n):
        if labels[i] is not None or not core[i]:
            continue
        labels[i] = cluster
        frontier = list(nbrs[i])
        while frontier:
            j = frontier.pop()
            if labels[j] is None:
                labels[j] = cluster
                if core[j]:
                    frontier.extend(k for k in nbrs[j] if labels[k] is None)
            elif labels[j] == -1:
                labels[j] = cluster
        cluster += 1
    return [(-1 if lab is None else lab) for lab in labels]


def coverage(selection: list[CommonRecourse], pool: RecoursePool,
             delta: float) -> float:
    """Fraction of inputs reachable through at least one selected center."""
    if pool.n_inputs == 0:
        return 0.0
    covered: set[int] = set()
    for r in selection:
        covered |= pool.covered_by(r.center, delta)
    return len(covered) / pool.n_inputs


def cost(selection: list[CommonRecourse], pool: RecoursePool,
         delta: float) -> float:
    """Sum over covered inputs of the smallest covering center norm."""
    best: dict[int, float] = {}
    for r in selection:
        norm = r.norm
        for i in pool.covered_by(r.center, delta):
            if norm < best.get(i, float("inf")):
                best[i] = norm
    return float(sum(best.values()))


def _cover_sets(clusters: list[CommonRecourse], pool: RecoursePool | None,
                delta: float | None) -> list[frozenset[int]]:
    if pool is not None:
        if delta is None:
            raise ValueError("delta required when recomputing coverage from a pool")
        return [pool.covered_by(r.center, delta) for r in clusters]
    return [r.covered_inputs for r in clusters]


def greedy_select(clusters: list[CommonRecourse], budget: int,
                  pool: RecoursePool | None = None, delta: float | None = None,
                  theta: float = float("nan"),
                  n_inputs: int | None = None) -> Summary:
    """Greedy maximum-coverage selection of at most ``budget`` clusters.

    Ties by smaller added cost, then by stable cluster index; stops early
    once no remaining cluster adds coverage.
    """
    sets = _cover_sets(clusters, pool, delta)
    n_inputs = pool.n_inputs if pool is not None else (n_inputs or 0)
    covered: set[int] = set()
    best_norm: dict[int, float] = {}
    picked: list[int] = []
    gains: list[int] = []
    remaining = list(range(len(clusters)))
    for _ in range(budget):
        best = None
        for idx in remaining:
            gain = len(sets[idx] - covered)
            if gain == 0:
                continue
            # newly covered inputs pay the center norm, already covered ones
            # only improve (never increase) their minimum
            added_cost = _cost_delta(sets[idx], clusters[idx].norm, best_norm)
            key = (-gain, added_cost, idx)
            if best is None or key < best[0]:
                best = (key, idx)
        if best is None:
            break
        idx = best[1]
        picked.append(idx)
        gains.append(len(sets[idx] - covered))
        covered |= sets[idx]
        norm = clusters[idx].norm
        for i in sets[idx]:
            if norm < best_norm.get(i, float("inf")):
                best_norm[i] = norm
        remaining.remove(idx)
    selection = [clusters[i] for i in picked]
    cov = len(covered) / n_inputs if n_inputs else 0.0
    return Summary(
        selected=selection,
        coverage=cov,
        cost=float(sum(best_norm.values())),
        theta=theta,
        delta=delta if delta is not None else float("nan"),
        covered_inputs=frozenset(covered),
        gain_sequence=gains,
    )


def _cost_delta(cover: frozenset[int], norm: float,
                best_norm: dict[int, float]) -> float:
    delta = 0.0
    for i in cover:
        cur = best_norm.get(i)
        if cur is None:
            delta += norm
        elif norm < cur:
            delta += norm - cur
    return delta


def brute_force_best_R(clusters: list[CommonRecourse], budget: int,
                       pool: RecoursePool | None = None,
                       delta: float | None = None,
                       n_inputs: int | None = None,
                       subset_cap: int = BRUTE_FORCE_SUBSET_CAP,
                       ) -> tuple[tuple[int, ...], int]:
    """Optimal selection by exhaustive enumeration.

    Returns (cluster indices, number of covered inputs).  Ties resolve to
    the lexicographically smallest index tuple of the smallest winning size.
    """
    sets = _cover_sets(clusters, pool, delta)
    m = len(sets)
    budget = min(budget, m)
    total = sum(_comb(m, r) for r in range(budget + 1))
    if total > subset_cap:
        raise SubsetCapError(f"{total} subsets exceeds cap {subset_cap}")
    best = ((), 0)
    for r in range(1, budget + 1):
        for combo in itertools.combinations(range(m), r):
            covered = frozenset().union(*(sets[i] for i in combo))
            if len(covered) > best[1]:
                best = (combo, len(covered))
    return best


def _comb(n: int, r: int) -> int:
    import math
    return math.comb(n, r)


def fc_filter_nearest(candidates: dict[bytes, "object"], inputs,
                      embedder) -> list[bytes]:
    """Keep, for each input graph, the candidate with smallest recourse norm.

    Returns the union of per-input nearest candidates (deduplicated canonical
    keys, sorted); ties break toward the smaller canonical key.
    """
    if not candidates:
        return []
    keys = sorted(candidates)
    cand_z = np.stack([embedder.embed(candidates[k]) for k in keys])
    kept: set[bytes] = set()
    for g in inputs:
        zg = embedder.embed(g)
        d = np.linalg.norm(cand_z - zg, axis=1)
        kept.add(keys[int(np.argmin(d))])
    return sorted(kept)


def fc_objective(targets: set[bytes], pool: RecoursePool, delta: float,
                 budget: int, subset_cap: int = 50_000) -> tuple[int, str]:
    """Best coverage count from a counterfactual set via common recourse.

    Clusters the restricted pool and picks the best ``budget`` clusters,
    exhaustively when the subset count is small, greedily otherwise; the
    second element reports which evaluator ran.
    """
    sub = pool.restrict_targets(targets)
    if len(sub) == 0:
        return 0, "empty"
    clusters = cluster_recourse(sub, delta)
    try:
        _, covered = brute_force_best_R(clusters, budget, subset_cap=subset_cap)
        return covered, "exhaustive"
    except SubsetCapError:
        s = greedy_select(clusters, budget, n_inputs=sub.n_inputs)
        return len(s.covered_inputs), "greedy"


@dataclass
class RandomizedGreedyResult:
    selected: list[bytes]
    objective: int
    c1_held: bool


def randomized_greedy_fc(pool_targets: list[bytes], evaluate, T: int, R: int,
                         rng) -> RandomizedGreedyResult:
    """Randomized greedy for the counterfactual-budget problem.

    At each of T rounds, form the T-element set of highest singleton marginal
    gains over the current selection and add a uniformly random member.
    ``evaluate(frozenset of targets) -> int`` is the coverage objective;
    c1_held records whether every realized marginal gain was positive.
    """
    if len(pool_targets) < T:
        raise ValueError(f"pool of {len(pool_targets)} smaller than budget T={T}")
    selected: list[bytes] = []
    current = 0
    c1 = True
    remaining = sorted(pool_targets)
    for _ in range(T):
        gains = []
        for e in remaining:
            val = evaluate(frozenset(selected) | {e})
            gains.append((val - current, e))
        gains.sort(key=lambda t: (-t[0], t[1]))
        m_i = gains[: min(T, len(gains))]
        pick = m_i[int(rng.integers(len(m_i)))][1]
        selected.append(pick)
        remaining.remove(pick)
        new = evaluate(frozenset(selected))
        if new - current <= 0:
            c1 = False
        current = new
    return RandomizedGreedyResult(selected=selected, objective=current, c1_held=c1)


def two_budget_two_cover(family1: list[frozenset], family2: list[frozenset],
                         k1: int, k2: int, exhaustive_cap: int = 12,
                         ) -> tuple[tuple[int, ...], tuple[int, ...], int, bool]:
    """Pick <= k1 sets from family1 and <= k2 from family2 maximizing
    |union(picks1) & union(picks2)|.

    Exhaustive for small families, greedy alternating heuristic otherwise;
    the final flag is True when the result is exact.
    """
    if k1 <= 0 or k2 <= 0:
        return (), (), 0, True
    if len(family1) <= exhaustive_cap and len(family2) <= exhaustive_cap:
        best = ((), (), 0)
        for r1 in range(1, min(k1, len(family1)) + 1):
            for c1 in itertools.combinations(range(len(family1)), r1):
                u1 = frozenset().union(*(family1[i] for i in c1))
                for r2 in range(1, min(k2, len(family2)) + 1):
                    for c2 in itertools.combinations(range(len(family2)), r2):
                        u2 = frozenset().union(*(family2[i] for i in c2))
                        obj = len(u1 & u2)
                        if obj > best[2]:
                            best = (c1, c2, obj)
        return best[0], best[1], best[2], True
    picks1, picks2 = _alternating_greedy(family1, family2, k1, k2)
    u1 = frozenset().union(frozenset(), *(family1[i] for i in picks1))
    u2 = frozenset().union(frozenset(), *(family2[i] for i in picks2))
    return tuple(picks1), tuple(picks2), len(u1 & u2), False


def _alternating_greedy(family1, family2, k1, k2):
    picks1: list[int] = []
    picks2: list[int] = []
    u1: frozenset = frozenset()
    u2: frozenset = frozenset()
    universe = frozenset().union(frozenset(), *family1) & \
        frozenset().union(frozenset(), *family2)
    for _ in range(k1 + k2):
        best = None
        if len(picks1) < k1:
            for i, s in enumerate(family1):
                if i in picks1:
                    continue
                gain = len((u1 | s) & (u2 if picks2 else universe)) - len(u1 & u2)
                if best is None or gain > best[0]:
                    best = (gain, 1, i, s)
        if len(picks2) < k2:
            for i, s in enumerate(family2):
                if i in picks2:
                    continue
                gain = len((u2 | s) & (u1 if picks1 else universe)) - len(u1 & u2)
                if best is None or gain > best[0]:
                    best = (gain, 2, i, s)
        if best is None:
            break
        _, side, i, s = best
        if side == 1:
            picks1.append(i)
            u1 |= s
        else:
            picks2.append(i)
            u2 |= s
    return picks1, picks2


def counterfactual_set_coverage(cf_graphs, inputs, embedder,
                                theta: float) -> float:
    """Fraction of inputs within theta of at least one counterfactual."""
    if not inputs:
        return 0.0
    if not cf_graphs:
        return 0.0
    cz = np.stack([embedder.embed(g) for g in cf_graphs])
    covered = 0
    for g in inputs:
        d = np.linalg.norm(cz - embedder.embed(g), axis=1)
        if float(d.min()) <= theta:
            covered += 1
    return covered / len(inputs)


def build_pool(inputs, candidates: dict[bytes, "object"], embedder,
               theta: float) -> RecoursePool:
    """All recourse vectors from inputs to candidates within theta.

    The candidate dict is keyed by canonical key, so targets come straight
    from the keys; distances are computed row-wise per input against a
    single candidate embedding matrix.
    """
    from .embedding import check_dim

    keys = sorted(candidates)
    if not keys:
        return RecoursePool([], n_inputs=len(inputs))
    zc = np.stack([check_dim(embedder, embedder.embed(candidates[k]))
                   for k in keys])
    vectors = []
    for idx, g in enumerate(inputs):
        diff = zc - check_dim(embedder, embedder.embed(g))
        dist = np.linalg.norm(diff, axis=1)
        for j in np.flatnonzero(dist <= theta):
            vectors.append(RecourseVector(vec=diff[j].copy(), source=idx,
                                          target=keys[int(j)]))
    return RecoursePool(vectors, n_inputs=len(inputs))
