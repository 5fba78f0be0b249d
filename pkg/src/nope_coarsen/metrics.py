"""Smoothness and connectivity diagnostics tracked along a coarsening run."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .coarsen import CoarseningResult
from .graph import CoarseningState, StaticGraph, check_features, extract_coarse_graph

EBC_MAX_NODES = 5000
DEFAULT_EWMA_ALPHA = 0.01


def dirichlet_energy(graph: StaticGraph, features) -> float:
    """Mean squared feature difference across edges (each edge counted once)."""
    if graph.m == 0:
        raise ValueError("Dirichlet energy is undefined on an edgeless graph")
    x = check_features(features, graph.n)
    e = graph.edge_array()
    diff = x[e[:, 0]] - x[e[:, 1]]
    return float(np.einsum("ij,ij->", diff, diff) / graph.m)


def edge_betweenness(graph: StaticGraph, max_nodes: int = EBC_MAX_NODES) -> dict[tuple[int, int], float]:
    """Exact unweighted edge betweenness over unordered pairs ``s < t``.

    Brandes accumulation on the BFS shortest-path DAG from every source; each
    unordered pair is seen from both ends, so totals are halved.
    """
    n = graph.n
    if n > max_nodes:
        raise ValueError(f"exact betweenness refused for n={n} > {max_nodes}")
    adj = [sorted(s) for s in graph.neighbors]
    eb = {(u, v): 0.0 for u, v in graph.edge_array().tolist()}
    for s in range(n):
        order = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = [0] * n
        dist = [-1] * n
        sigma[s] = 1
        dist[s] = 0
        q = deque([s])
        while q:
            v = q.popleft()
            order.append(v)
            dv = dist[v] + 1
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dv
                    q.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = [0.0] * n
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                c = sigma[v] * coeff
                eb[(v, w) if v < w else (w, v)] += c
                delta[v] += c
    return {e: val / 2.0 for e, val in eb.items()}


def avg_edge_betweenness(graph: StaticGraph, max_nodes: int = EBC_MAX_NODES) -> float:
    if graph.m == 0:
        raise ValueError("average edge betweenness is undefined on an edgeless graph")
    eb = edge_betweenness(graph, max_nodes)
    return float(sum(eb.values()) / graph.m)


def ewma(series, alpha: float = DEFAULT_EWMA_ALPHA) -> np.ndarray:
    """``y[0] = x[0]``, ``y[t] = alpha * x[t] + (1 - alpha) * y[t-1]``."""
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise ValueError("ewma needs a non-empty series")
    y = np.empty_like(x)
    acc = x[0]
    for t, val in enumerate(x):
        acc = val if t == 0 else alpha * val + (1.0 - alpha) * acc
        y[t] = acc
    return y


@dataclass
class TrajectoryReport:
    algorithm: str
    rounds: list[int]
    raw_interference: list[float]
    smoothed: list[float]
    dirichlet_checkpoints: list[tuple[int, float]] = field(default_factory=list)
    ebc_checkpoints: list[tuple[int, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "rounds": self.rounds,
            "raw_interference": self.raw_interference,
            "smoothed": self.smoothed,
            "dirichlet_checkpoints": [list(c) for c in self.dirichlet_checkpoints],
            "ebc_checkpoints": [list(c) for c in self.ebc_checkpoints],
        }


def _nan_if_edgeless(fn, g: StaticGraph, *args) -> float:
    return fn(g, *args) if g.m else float("nan")


def trajectory_report(graph: StaticGraph, features, result: CoarseningResult,
                      checkpoint_stride: int, alpha: float = DEFAULT_EWMA_ALPHA,
                      with_ebc: bool = True, ebc_max_nodes: int = EBC_MAX_NODES) -> TrajectoryReport:
    """Per-round interference plus metrics sampled every ``checkpoint_stride`` merges.

    The merge sequence is replayed on a fresh state and the coarse graph is
    materialized at each checkpoint (start and end always included).
    Betweenness is skipped at checkpoints larger than ``ebc_max_nodes``.
    """
    if checkpoint_stride < 1:
        raise ValueError("checkpoint_stride must be >= 1")
    trace = result.trace
    if not trace and result.coarse.partition.n_c < graph.n:
        raise ValueError("result carries no trace; rerun with record_trace")
    if trace and any(r.exact_interference is None for r in trace):
        raise ValueError("trace lacks exact interference values; rerun with recompute_exact_in_trace")
    raw = [float(r.exact_interference) for r in trace]
    smooth = ewma(raw, alpha).tolist() if raw else []

    x = check_features(features, graph.n)
    state = CoarseningState(graph, x)
    dir_cp, ebc_cp = [], []

    def checkpoint():
        coarse = extract_coarse_graph(state, graph)
        g = coarse.graph
        dir_cp.append((g.n, _nan_if_edgeless(dirichlet_energy, g, coarse.features)))
        if with_ebc and g.n <= ebc_max_nodes:
            ebc_cp.append((g.n, _nan_if_edgeless(avg_edge_betweenness, g, ebc_max_nodes)))

    checkpoint()
    total = len(trace)
    for rec in trace:
        state.merge_pair(rec.u, rec.v)
        state.retire(rec.u, rec.v)
        done = rec.round + 1
        if done % checkpoint_stride == 0 or done == total:
            checkpoint()
    return TrajectoryReport(result.algorithm, [r.round for r in trace], raw, smooth, dir_cp, ebc_cp)
