"""Scaling benchmark: engine wall time and tracked memory across graph sizes."""

from __future__ import annotations

import gc
from dataclasses import dataclass

import numpy as np

from .coarsen import EngineConfig, coarsen
from .graph import StaticGraph
from .synth import cluster_labels, gen_cluster_features, gen_erdos_renyi, gen_planted_partition

BENCH_CLUSTERS = 4
BENCH_CENTER_SCALE = 1.0
BENCH_NOISE_SIGMA = 0.5


@dataclass
class BenchRow:
    n: int
    m: int
    algorithm: str
    wall_ms: float
    peak_bytes: int
    status: str


def memory_budget(n: int, d: int, m: int) -> int:
    """Linear-space allowance ``4 * (2n * d * 8 + m * 16)`` bytes."""
    return 4 * (2 * n * d * 8 + m * 16)


def bench_instance(kind: str, n: int, avg_degree: float, dim: int, seed: int,
                   clusters: int = BENCH_CLUSTERS) -> tuple[StaticGraph, np.ndarray]:
    """ER graph with edge probability ``avg_degree / (n - 1)``, or a planted
    partition whose within/between probabilities give the same mean degree
    with a 10:1 density contrast.
    """
    if kind == "er":
        g = gen_erdos_renyi(n, min(1.0, avg_degree / (n - 1)), seed)
        labels = cluster_labels(n, clusters)
    elif kind == "planted":
        size = n / clusters
        # expected degree = p_in * (size - 1) + p_out * (n - size), with p_in = 10 p_out
        p_out = avg_degree / (10 * (size - 1) + (n - size))
        g, labels = gen_planted_partition(n, clusters, 10 * p_out, p_out, seed)
    else:
        raise ValueError(f"unknown graph kind {kind!r}")
    x = gen_cluster_features(labels, dim, BENCH_CENTER_SCALE, BENCH_NOISE_SIGMA, seed + 1)
    return g, x


def time_engine(graph: StaticGraph, features, algorithm: str, ratio: float,
                repeats: int = 1) -> tuple[float, int, str]:
    """Best-of-``repeats`` engine wall time (ms), peak tracked bytes, status."""
    best = None
    for _ in range(repeats):
        gc.collect()
        res = coarsen(graph, features, EngineConfig(algorithm, ratio, record_trace=False))
        if best is None or res.wall_ms < best.wall_ms:
            best = res
    return best.wall_ms, best.peak_bytes, best.status


def run_bench(sizes, algorithms, avg_degree: float, dim: int, ratio: float, seed: int,
              kind: str = "er", repeats: int = 1, progress=None) -> list[BenchRow]:
    rows = []
    for n in sizes:
        g, x = bench_instance(kind, n, avg_degree, dim, seed)
        for alg in algorithms:
            wall, peak, status = time_engine(g, x, alg, ratio, repeats)
            row = BenchRow(n, g.m, alg, wall, peak, status)
            rows.append(row)
            if progress is not None:
                progress(row)
    return rows


def loglog_slope(sizes, times) -> float | None:
    """Least-squares slope of ``log t`` against ``log n``; ``None`` below two sizes."""
    sizes = np.asarray(sizes, dtype=np.float64)
    times = np.asarray(times, dtype=np.float64)
    if np.unique(sizes).size < 2:
        return None
    slope, _ = np.polyfit(np.log(sizes), np.log(times), 1)
    return float(slope)
