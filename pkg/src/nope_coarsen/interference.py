"""Scoring math: exact neighborhood interference, its sum-square cache, and the
expected-interference surrogate.

Similarity between two nodes is the dot product of their feature rows. For a
candidate pair ``(u, v)`` the affected neighborhood is
``U = (N_u | N_v) - {u, v}``.
"""

from __future__ import annotations

import numpy as np

from .graph import FLOAT_BYTES, CoarseningState


def edge_weight_factor(s_u: float, s_v: float) -> float:
    """Size weight ``s_u * s_v / (s_u + s_v)`` shared by both scores."""
    return s_u * s_v / (s_u + s_v)


def _union_neighborhood(state: CoarseningState, u: int, v: int) -> np.ndarray:
    union = state.nbr[u] | state.nbr[v]
    union.discard(u)
    union.discard(v)
    return np.fromiter(sorted(union), dtype=np.int64, count=len(union))


def interference_exact(state: CoarseningState, u: int, v: int) -> float:
    """Interference of merging ``u`` and ``v``:
    ``w(s_u, s_v) * sum_{i in U} (<x_i, x_u> - <x_i, x_v>)**2``.
    """
    state.check_edge(u, v)
    idx = _union_neighborhood(state, u, v)
    if idx.size == 0:
        return 0.0
    x = state.x
    diff = x[idx] @ x[u] - x[idx] @ x[v]
    return edge_weight_factor(state.size[u], state.size[v]) * float(diff @ diff)


def interference_unsimplified(state: CoarseningState, u: int, v: int) -> float:
    """Same quantity before the algebraic simplification: each endpoint's
    similarity to every neighbor is compared with the merged node's, weighted
    by endpoint size. Kept only to cross-check :func:`interference_exact`.
    """
    state.check_edge(u, v)
    idx = _union_neighborhood(state, u, v)
    if idx.size == 0:
        return 0.0
    x = state.x
    su, sv = state.size[u], state.size[v]
    xw = (su * x[u] + sv * x[v]) / (su + sv)
    xn = x[idx]
    s_iu, s_iv, s_iw = xn @ x[u], xn @ x[v], xn @ xw
    return float(np.sum(su * (s_iu - s_iw) ** 2 + sv * (s_iv - s_iw) ** 2))


def expected_interference(state: CoarseningState, u: int, v: int) -> float:
    """Expected interference under local isotropy with unit variance:
    ``w(s_u, s_v) * |U| * ||x_u - x_v||**2``, where ``|U|`` comes from the
    degree shortcut ``deg[u] + deg[v] - |N_u & N_v| - 2``.
    """
    state.check_edge(u, v)
    nu, nv = state.nbr[u], state.nbr[v]
    struct = max(0, state.deg[u] + state.deg[v] - len(nu & nv) - 2)
    delta = state.x[u] - state.x[v]
    return edge_weight_factor(state.size[u], state.size[v]) * struct * float(delta @ delta)


def init_sumsq_cache(state: CoarseningState) -> None:
    """``sumsq[i] = sum_{k in N_i} <x_k, x_i>**2`` for every original node."""
    if state.sumsq is None:
        state.sumsq = np.zeros(state.n_max)
    x = state.x
    for i in range(state.n):
        nb = state.nbr[i]
        if nb:
            p = x[np.fromiter(nb, dtype=np.int64, count=len(nb))] @ x[i]
            state.sumsq[i] = p @ p
        else:
            state.sumsq[i] = 0.0


def cache_update_after_merge(state: CoarseningState, w: int, u: int, v: int) -> int:
    """Refresh the sum-square cache after ``(u, v) -> w``.

    ``sumsq[w]`` is computed directly; each neighbor ``k`` of ``w`` receives the
    correction ``<x_k,x_w>**2 - <x_k,x_u>**2 [k in N_u] - <x_k,x_v>**2 [k in N_v]``.
    Requires the pre-merge neighbor sets of ``u`` and ``v``. Returns the bytes
    of the transient neighbor matrices it used.
    """
    nw = state.nbr[w]
    if not nw:
        state.sumsq[w] = 0.0
        return 0
    ks = np.fromiter(sorted(nw), dtype=np.int64, count=len(nw))
    xn = state.x[ks]
    p_w = xn @ state.x[w]
    p_u = xn @ state.x[u]
    p_v = xn @ state.x[v]
    nu, nv = state.nbr[u], state.nbr[v]
    m_u = np.fromiter((k in nu for k in ks.tolist()), dtype=bool, count=ks.size)
    m_v = np.fromiter((k in nv for k in ks.tolist()), dtype=bool, count=ks.size)
    p_w2 = p_w * p_w
    state.sumsq[w] = p_w2.sum()
    eps = p_w2 - (np.where(m_u, p_u * p_u, 0.0) + np.where(m_v, p_v * p_v, 0.0))
    state.sumsq[ks] += eps
    return xn.nbytes + 4 * ks.size * FLOAT_BYTES


# -- batched scoring used by the engines --------------------------------------
#
# Each function scores the edges (w, k) for k in ``ks`` on the current state and
# returns (scores, transient_bytes).


def exact_scores_incident(state: CoarseningState, w: int, ks: list[int]) -> tuple[np.ndarray, int]:
    """``ks`` must be a sorted subset of ``N_w``."""
    x = state.x
    nbr = state.nbr
    nw = nbr[w]
    nw_idx = np.fromiter(sorted(nw), dtype=np.int64, count=len(nw))
    kidx = np.asarray(ks, dtype=np.int64)
    m = kidx.size
    rows = np.searchsorted(nw_idx, kidx)  # where each k sits among w's neighbors
    a = x[nw_idx]
    delta = x[w] - x[kidx]       # row j: x_w - x_k
    inner = np.empty(m)
    block = max(state.d, 1)
    # Column blocks keep the Gram slab at O(|N_w| * d).
    for lo in range(0, m, block):
        hi = min(lo + block, m)
        g = a @ delta[lo:hi].T
        g[rows[lo:hi], np.arange(hi - lo)] = 0.0  # drop i == k
        inner[lo:hi] = np.einsum("ij,ij->j", g, g)
    extra = np.zeros(m)
    extra_peak = 0
    for j, k in enumerate(ks):
        rest = nbr[k] - nw
        rest.discard(w)
        if rest:
            r = x[np.fromiter(rest, dtype=np.int64, count=len(rest))] @ delta[j]
            extra[j] = r @ r
            extra_peak = max(extra_peak, len(rest))
    size = state.size
    sw = size[w]
    sk = np.fromiter((size[k] for k in ks), dtype=np.float64, count=m)
    scores = (sw * sk / (sw + sk)) * (inner + extra)
    transient = ((nw_idx.size + m) * state.d + nw_idx.size * min(block, m)
                 + extra_peak * state.d + 4 * m) * FLOAT_BYTES
    return scores, transient


def expected_scores_incident(state: CoarseningState, w: int, ks: list[int]) -> tuple[np.ndarray, int]:
    nbr, deg, size = state.nbr, state.deg, state.size
    nw = nbr[w]
    base = deg[w] - 2
    struct = np.array([base + deg[k] - len(nw & nbr[k]) for k in ks], dtype=np.float64)
    np.maximum(struct, 0.0, out=struct)
    delta = state.x[ks] - state.x[w]
    feat = np.einsum("ij,ij->i", delta, delta)
    sw = size[w]
    sk = np.array([size[k] for k in ks], dtype=np.float64)
    scores = (sw * sk / (sw + sk)) * struct * feat
    return scores, (len(ks) * state.d + 4 * len(ks)) * FLOAT_BYTES


def cosine_scores_incident(state: CoarseningState, w: int, ks: list[int]) -> tuple[np.ndarray, int]:
    """Negated cosine similarity, so that a min-heap pops the most similar pair."""
    xn = state.x[np.asarray(ks, dtype=np.int64)]
    xw = state.x[w]
    dots = xn @ xw
    norms = np.sqrt(np.einsum("ij,ij->i", xn, xn)) * np.sqrt(xw @ xw)
    cos = np.divide(dots, norms, out=np.zeros_like(dots), where=norms > 0)
    return -cos, (len(ks) * state.d + 3 * len(ks)) * FLOAT_BYTES
