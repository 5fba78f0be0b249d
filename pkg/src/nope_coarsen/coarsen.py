"""Greedy contraction engines sharing one lazy-deletion min-heap loop.

``nope`` orders candidates by exact neighborhood interference and maintains the
sum-square cache, ``nope_star`` by the expected-interference surrogate, and
``selfish_cosine`` by descending cosine similarity of the endpoints.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .graph import (
    CoarsenedGraph,
    CoarseningState,
    StaticGraph,
    check_features,
    extract_coarse_graph,
)
from .interference import (
    cache_update_after_merge,
    cosine_scores_incident,
    exact_scores_incident,
    expected_scores_incident,
    init_sumsq_cache,
    interference_exact,
)

ALGORITHMS = ("nope", "nope_star", "selfish_cosine")

COMPLETE = "complete"
TARGET_NOT_REACHED = "target-not-reached"


@dataclass(frozen=True)
class EngineConfig:
    algorithm: str = "nope"
    ratio: float = 0.5
    seed: int = 0
    record_trace: bool = True
    recompute_exact_in_trace: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {ALGORITHMS}")
        if not (0.0 < self.ratio < 1.0):
            raise ValueError(f"ratio must lie in (0, 1), got {self.ratio}")


class ScoredCandidate(NamedTuple):
    """Heap entry layout. Field order is the heap order, so ties break on ids
    then age. The engine pushes plain tuples of this shape for speed.
    """

    score: float
    u: int
    v: int
    insertion_seq: int


@dataclass(frozen=True)
class MergeRecord:
    round: int
    u: int
    v: int
    w: int
    score: float
    exact_interference: float | None = None


@dataclass
class CoarseningResult:
    coarse: CoarsenedGraph
    trace: list[MergeRecord]
    status: str
    target: int
    wall_ms: float
    peak_bytes: int
    algorithm: str = ""
    config: EngineConfig | None = field(default=None, repr=False)

    @property
    def complete(self) -> bool:
        return self.status == COMPLETE


def stop_target(n: int, ratio: float) -> int:
    """Minimum live-node count ``ceil(n * (1 - ratio))``; merging stops at or below it."""
    if not (0.0 < ratio < 1.0):
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    # 10 * (1 - 0.7) is 3.0000000000000004 in floating point
    return math.ceil(round(n * (1.0 - ratio), 9))


Scorer = Callable[[CoarseningState, int, list], tuple[np.ndarray, int]]

_SCORERS: dict[str, Scorer] = {
    "nope": exact_scores_incident,
    "nope_star": expected_scores_incident,
    "selfish_cosine": cosine_scores_incident,
}


def _greedy_contract(graph: StaticGraph, features, config: EngineConfig,
                     state_hook: Callable[[CoarseningState, int], None] | None = None
                     ) -> CoarseningResult:
    x = check_features(features, graph.n)
    t0 = time.perf_counter()
    algorithm = config.algorithm
    use_cache = algorithm == "nope"
    score_incident = _SCORERS[algorithm]

    state = CoarseningState(graph, x, with_sumsq=use_cache, with_degrees=algorithm == "nope_star")
    if use_cache:
        init_sumsq_cache(state)
    target = stop_target(graph.n, config.ratio)
    seq = itertools.count()
    heap: list[tuple[float, int, int, int]] = []
    transient_peak = 0

    # Initial candidates: every edge (u, k) with k > u, in lexicographic order.
    for u in range(graph.n):
        ks = sorted(k for k in state.nbr[u] if k > u)
        if not ks:
            continue
        scores, transient = score_incident(state, u, ks)
        transient_peak = max(transient_peak, transient)
        heap.extend((s, u, k, next(seq)) for s, k in zip(scores.tolist(), ks))
    heapq.heapify(heap)
    memory = state.memory
    memory.observe(state.adj_entries, len(heap), transient_peak)

    trace: list[MergeRecord] = []
    active = state.active
    status = COMPLETE
    rnd = 0
    heappush, heappop = heapq.heappush, heapq.heappop
    while state.num_active > target:
        if not heap:
            status = TARGET_NOT_REACHED
            break
        score, u, v, _ = heappop(heap)
        if not (active[u] and active[v]):
            continue  # lazy removal
        exact = interference_exact(state, u, v) if config.recompute_exact_in_trace else None
        w = state.merge_pair(u, v)
        transient = cache_update_after_merge(state, w, u, v) if use_cache else 0
        ks = sorted(state.nbr[w])
        if ks:
            scores, t_score = score_incident(state, w, ks)
            transient = max(transient, t_score)
            # w is the largest live id, so (k, w) is the canonical orientation
            for s, k in zip(scores.tolist(), ks):
                heappush(heap, (s, k, w, next(seq)))
        state.retire(u, v)
        memory.observe(state.adj_entries, len(heap), transient)
        if config.record_trace:
            trace.append(MergeRecord(rnd, u, v, w, score, exact))
        if state_hook is not None:
            state_hook(state, rnd)
        rnd += 1

    wall_ms = (time.perf_counter() - t0) * 1e3
    coarse = extract_coarse_graph(state, graph)
    return CoarseningResult(coarse, trace, status, target, wall_ms, memory.peak,
                            algorithm, config)


def run_nope(graph: StaticGraph, features, config: EngineConfig | None = None, **kw) -> CoarseningResult:
    """Greedy contraction by minimum exact interference, with the sum-square cache."""
    config = config or EngineConfig(algorithm="nope")
    if config.algorithm != "nope":
        raise ValueError("run_nope needs config.algorithm == 'nope'")
    return _greedy_contract(graph, features, config, **kw)


def run_nope_star(graph: StaticGraph, features, config: EngineConfig | None = None, **kw) -> CoarseningResult:
    """Greedy contraction by minimum expected interference; no neighbor-level dot products."""
    config = config or EngineConfig(algorithm="nope_star")
    if config.algorithm != "nope_star":
        raise ValueError("run_nope_star needs config.algorithm == 'nope_star'")
    return _greedy_contract(graph, features, config, **kw)


def run_selfish_cosine(graph: StaticGraph, features, config: EngineConfig | None = None, **kw) -> CoarseningResult:
    """Baseline: merge the most cosine-similar adjacent pair first."""
    config = config or EngineConfig(algorithm="selfish_cosine")
    if config.algorithm != "selfish_cosine":
        raise ValueError("run_selfish_cosine needs config.algorithm == 'selfish_cosine'")
    return _greedy_contract(graph, features, config, **kw)


def coarsen(graph: StaticGraph, features, config: EngineConfig, **kw) -> CoarseningResult:
    """Dispatch on ``config.algorithm``."""
    return _greedy_contract(graph, features, config, **kw)
