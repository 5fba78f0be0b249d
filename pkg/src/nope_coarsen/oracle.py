"""Slow reference implementations used as ground truth in tests.

Everything here uses plain Python loops over lists of floats: no cache, no
vectorized batches. The greedy policy (heap order, lazy removal, which edges
get rescored) is the same as the engines', so traces are directly comparable.
"""

from __future__ import annotations

import heapq
import itertools
import math

import numpy as np

from .coarsen import COMPLETE, TARGET_NOT_REACHED, CoarseningResult, EngineConfig, MergeRecord, stop_target
from .graph import CoarseningState, Partition, StaticGraph, CoarsenedGraph, check_features
from .interference import expected_interference, interference_exact


def _dot(a: list[float], b: list[float]) -> float:
    total = 0.0
    for p, q in zip(a, b):
        total += p * q
    return total


def _naive_interference(feats, sizes, nbrs, u, v) -> float:
    su, sv = sizes[u], sizes[v]
    total = 0.0
    for i in (nbrs[u] | nbrs[v]) - {u, v}:
        d = _dot(feats[i], feats[u]) - _dot(feats[i], feats[v])
        total += d * d
    return su * sv / (su + sv) * total


def oracle_nope(graph: StaticGraph, features, config: EngineConfig) -> CoarseningResult:
    """Greedy minimum-interference contraction with every score from scratch."""
    x = check_features(features, graph.n)
    n = graph.n
    feats: dict[int, list[float]] = {i: row for i, row in enumerate(x.tolist())}
    sizes: dict[int, int] = {i: 1 for i in range(n)}
    nbrs: dict[int, set[int]] = {i: set(graph.neighbors[i]) for i in range(n)}
    alive = set(range(n))
    parent: dict[int, int] = {}
    seq = itertools.count()

    heap = []
    for u in range(n):
        for k in sorted(nbrs[u]):
            if k > u:
                heap.append((_naive_interference(feats, sizes, nbrs, u, k), u, k, next(seq)))
    heapq.heapify(heap)

    target = stop_target(n, config.ratio)
    trace = []
    status = COMPLETE
    next_id = n
    while len(alive) > target:
        if not heap:
            status = TARGET_NOT_REACHED
            break
        score, u, v, _ = heapq.heappop(heap)
        if u not in alive or v not in alive:
            continue
        exact = _naive_interference(feats, sizes, nbrs, u, v) if config.recompute_exact_in_trace else None
        w = next_id
        next_id += 1
        su, sv = sizes[u], sizes[v]
        sizes[w] = su + sv
        feats[w] = [(su * a + sv * b) / (su + sv) for a, b in zip(feats[u], feats[v])]
        nbrs[w] = (nbrs[u] | nbrs[v]) - {u, v}
        for k in nbrs[w]:
            nbrs[k] = (nbrs[k] - {u, v}) | {w}
        alive -= {u, v}
        alive.add(w)
        parent[u] = parent[v] = w
        for k in sorted(nbrs[w]):
            heapq.heappush(heap, (_naive_interference(feats, sizes, nbrs, k, w), k, w, next(seq)))
        trace.append(MergeRecord(len(trace), u, v, w, score, exact))

    def root(i):
        while i in parent:
            i = parent[i]
        return i

    label: dict[int, int] = {}
    for i in range(n):
        label.setdefault(root(i), len(label))
    live = list(label)
    assignment = [label[root(i)] for i in range(n)]
    edges = [(label[a], label[b]) for a in live for b in nbrs[a] if a < b]
    coarse = CoarsenedGraph(
        StaticGraph.from_edges(len(live), edges),
        np.array([feats[s] for s in live], dtype=np.float64).reshape(len(live), x.shape[1]),
        Partition.from_assignment(assignment, len(live)),
        1.0 - len(live) / n,
    )
    return CoarseningResult(coarse, trace, status, target, 0.0, 0, "nope", config)


def sumsq_from_scratch(state: CoarseningState, i: int) -> float:
    xi = state.x[i].tolist()
    total = 0.0
    for k in state.nbr[i]:
        s = _dot(state.x[k].tolist(), xi)
        total += s * s
    return total


def check_sumsq(state: CoarseningState, floor: float = 1e-12) -> float:
    """Largest relative error between the cached and recomputed sum-squares
    over live ids. The denominator is floored so empty neighborhoods compare
    on absolute error.
    """
    worst = 0.0
    for i in state.active_ids():
        truth = sumsq_from_scratch(state, i)
        err = abs(float(state.sumsq[i]) - truth) / max(abs(truth), floor)
        worst = max(worst, err)
    return worst


def exhaustive_argmin(graph: StaticGraph, features, scorer: str = "exact") -> tuple[tuple[int, int], float]:
    """Minimum-score edge of the uncoarsened graph under the engine tie-break."""
    if graph.m == 0:
        raise ValueError("graph has no edges")
    score_fn = {"exact": interference_exact, "surrogate": expected_interference}[scorer]
    state = CoarseningState(graph, features)
    best = (math.inf, -1, -1)
    for u, v in graph.edge_array().tolist():
        cand = (score_fn(state, u, v), u, v)
        if cand < best:
            best = cand
    return (best[1], best[2]), best[0]
