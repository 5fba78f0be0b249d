"""Seeded synthetic graphs and clustered features.

All randomness comes from ``numpy.random.Generator`` over PCG64 seeded with
the caller's integer, so outputs are bit-reproducible for a given numpy
version.
"""

from __future__ import annotations

import numpy as np

from .graph import StaticGraph

RNG_NAME = "numpy.random.PCG64"


def _rng(seed) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Decode row-major upper-triangle indices into pairs ``i < j``."""
    k = np.asarray(k, dtype=np.int64)
    i = n - 2 - np.floor(np.sqrt(-8.0 * k + 4.0 * n * (n - 1) - 7) / 2.0 - 0.5).astype(np.int64)
    # row start offsets; fix any off-by-one from floating sqrt
    start = i * (2 * n - i - 1) // 2
    low = k < start
    i[low] -= 1
    start = i * (2 * n - i - 1) // 2
    nxt = (i + 1) * (2 * n - i - 2) // 2
    high = k >= nxt
    i[high] += 1
    start = i * (2 * n - i - 1) // 2
    j = k - start + i + 1
    return i, j


def _sample_pairs(rng: np.random.Generator, total: int, p: float) -> np.ndarray:
    """Uniform random subset of ``range(total)`` where each index is kept with prob ``p``."""
    if total == 0 or p <= 0.0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    count = int(rng.binomial(total, p))
    return np.sort(rng.choice(total, size=count, replace=False))


def erdos_renyi_edges(n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    if n < 2:
        return np.zeros((0, 2), dtype=np.int64)
    idx = _sample_pairs(rng, n * (n - 1) // 2, p)
    i, j = _pair_from_index(idx, n)
    return np.stack([i, j], axis=1)


def gen_erdos_renyi(n: int, p: float, seed: int) -> StaticGraph:
    """G(n, p): each unordered pair present independently with probability ``p``."""
    if n < 1 or not (0.0 <= p <= 1.0):
        raise ValueError(f"need n >= 1 and 0 <= p <= 1, got n={n}, p={p}")
    return StaticGraph.from_edges(n, erdos_renyi_edges(n, p, _rng(seed)))


def cluster_labels(n: int, k_clusters: int) -> np.ndarray:
    """Contiguous, near-equal blocks: node ``i`` belongs to ``i * k // n``."""
    return (np.arange(n, dtype=np.int64) * k_clusters) // n


def gen_planted_partition(n: int, k_clusters: int, p_in: float, p_out: float,
                          seed: int) -> tuple[StaticGraph, np.ndarray]:
    """Planted-partition graph with ``k_clusters`` contiguous blocks."""
    if k_clusters < 1 or k_clusters > n:
        raise ValueError(f"need 1 <= k_clusters <= n, got {k_clusters}")
    rng = _rng(seed)
    labels = cluster_labels(n, k_clusters)
    bounds = np.searchsorted(labels, np.arange(k_clusters + 1))
    parts = []
    for a in range(k_clusters):
        lo, hi = bounds[a], bounds[a + 1]
        parts.append(erdos_renyi_edges(hi - lo, p_in, rng) + lo)
        for b in range(a + 1, k_clusters):
            lo_b, hi_b = bounds[b], bounds[b + 1]
            width = hi_b - lo_b
            idx = _sample_pairs(rng, (hi - lo) * width, p_out)
            parts.append(np.stack([lo + idx // width, lo_b + idx % width], axis=1))
    edges = np.concatenate(parts) if parts else np.zeros((0, 2), dtype=np.int64)
    return StaticGraph.from_edges(n, edges), labels


def gen_cluster_features(labels, d: int, center_scale: float, noise_sigma: float,
                         seed: int) -> np.ndarray:
    """Row ``i`` = center of its cluster + isotropic Gaussian noise."""
    if d < 1:
        raise ValueError("d must be >= 1")
    labels = np.asarray(labels, dtype=np.int64)
    rng = _rng(seed)
    k = int(labels.max()) + 1 if labels.size else 0
    centers = rng.standard_normal((k, d)) * center_scale
    noise = rng.standard_normal((labels.size, d)) * noise_sigma
    return centers[labels] + noise
