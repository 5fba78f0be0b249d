"""Graph containers, the mutable contraction state, and partition handling."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class ContractViolation(ValueError):
    """A merge or score was requested for a pair that is not a live edge."""


class CapacityError(RuntimeError):
    """The pre-allocated supernode buffer is exhausted."""


@dataclass(frozen=True)
class StaticGraph:
    """Immutable simple undirected graph on ids ``0..n-1``."""

    n: int
    neighbors: tuple[frozenset[int], ...]
    m: int

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> "StaticGraph":
        """Build a graph, rejecting self-loops and out-of-range ids; duplicates collapse."""
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for u, v in np.asarray(edges, dtype=np.int64).reshape(-1, 2).tolist():
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        m = sum(len(s) for s in nbrs) // 2
        return cls(n, tuple(frozenset(s) for s in nbrs), m)

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def edge_array(self) -> np.ndarray:
        """All edges as an ``(m, 2)`` array with ``u < v``, lexicographically sorted."""
        out = np.empty((self.m, 2), dtype=np.int64)
        pos = 0
        for u in range(self.n):
            hi = sorted(k for k in self.neighbors[u] if k > u)
            out[pos:pos + len(hi), 0] = u
            out[pos:pos + len(hi), 1] = hi
            pos += len(hi)
        return out


def check_features(features, n: int | None = None) -> np.ndarray:
    """Validate a feature matrix and return it as a C-contiguous float64 array."""
    x = np.ascontiguousarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {x.shape}")
    if x.shape[1] < 1:
        raise ValueError("feature dimension must be >= 1")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"feature rows ({x.shape[0]}) do not match node count ({n})")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain NaN or Inf")
    return x


# Storage costs used by the memory accounting (bytes).
FLOAT_BYTES = 8
ID_BYTES = 8
HEAP_ENTRY_BYTES = 32  # score + two ids + insertion counter


class MemoryTracker:
    """Self-accounting of the float and id storage an engine holds.

    Counts are derived from container sizes, not from the interpreter, so the
    numbers are portable across machines.
    """

    def __init__(self) -> None:
        self.fixed = 0
        self.peak = 0

    def observe(self, adj_entries: int, heap_entries: int, transient: int = 0) -> int:
        total = (self.fixed + adj_entries * ID_BYTES
                 + heap_entries * HEAP_ENTRY_BYTES + transient)
        if total > self.peak:
            self.peak = total
        return total


class CoarseningState:
    """Mutable contraction state over a pre-allocated buffer of ``2n`` ids.

    Original nodes keep ids ``0..n-1``; the supernode created by the t-th merge
    gets id ``n + t``. Rows of ``x`` are never reclaimed, so retired ids stay
    readable after a merge.
    """

    def __init__(self, graph: StaticGraph, features, *, with_sumsq: bool = False,
                 with_degrees: bool = True) -> None:
        x0 = check_features(features, graph.n)
        n, d = x0.shape
        self.n = n
        self.d = d
        self.n_max = 2 * n
        self.x = np.zeros((self.n_max, d), dtype=np.float64)
        self.x[:n] = x0
        self.size = [1] * n + [0] * n
        self.active = bytearray(b"\x01" * n + b"\x00" * n)
        self.num_active = n
        self.nbr: list[set[int] | None] = [set(s) for s in graph.neighbors] + [None] * n
        self.deg = [len(s) for s in graph.neighbors] + [0] * n
        self.parent = [-1] * self.n_max
        self.next_id = n
        self.sumsq = np.zeros(self.n_max) if with_sumsq else None
        self.adj_entries = 2 * graph.m

        self.memory = MemoryTracker()
        arrays = 3 + (1 if with_degrees else 0) + (1 if with_sumsq else 0)  # size, parent, active
        self.memory.fixed = self.n_max * d * FLOAT_BYTES + arrays * self.n_max * ID_BYTES

    def is_active(self, i: int) -> bool:
        return 0 <= i < self.next_id and bool(self.active[i])

    def active_ids(self) -> list[int]:
        return [i for i in range(self.next_id) if self.active[i]]

    def check_edge(self, u: int, v: int) -> None:
        if u == v:
            raise ContractViolation(f"self-loop candidate ({u}, {v})")
        if not (self.is_active(u) and self.is_active(v)):
            raise ContractViolation(f"pair ({u}, {v}) has an inactive endpoint")
        if v not in self.nbr[u]:
            raise ContractViolation(f"pair ({u}, {v}) is not adjacent")

    def merge_pair(self, u: int, v: int) -> int:
        """Contract the live edge ``(u, v)`` into a new supernode and return its id.

        The old neighbor sets of ``u`` and ``v`` are left in place so that the
        cache update can read them; call :meth:`retire` afterwards to drop them.
        """
        self.check_edge(u, v)
        if self.next_id >= self.n_max:
            raise CapacityError(f"supernode buffer of {self.n_max} ids exhausted")
        w = self.next_id
        self.next_id += 1
        su, sv = self.size[u], self.size[v]
        sw = su + sv
        self.size[w] = sw
        self.x[w] = (su * self.x[u] + sv * self.x[v]) / sw

        nu, nv = self.nbr[u], self.nbr[v]
        nw = nu | nv
        nw.discard(u)
        nw.discard(v)
        self.nbr[w] = nw
        self.adj_entries += 2 * len(nw) - 2 * (len(nu) + len(nv) - 1)

        nbr, deg = self.nbr, self.deg
        for k in nw:
            nk = nbr[k]
            nk.discard(u)
            nk.discard(v)
            nk.add(w)
            deg[k] = len(nk)
        deg[w] = len(nw)

        self.active[u] = 0
        self.active[v] = 0
        self.active[w] = 1
        self.num_active -= 1
        self.parent[u] = w
        self.parent[v] = w
        return w

    def retire(self, *ids: int) -> None:
        for i in ids:
            self.nbr[i] = None

    def find_root(self, i: int) -> int:
        """Follow parent links to the live supernode holding ``i`` (with path compression)."""
        root = i
        parent = self.parent
        while parent[root] >= 0:
            root = parent[root]
        while parent[i] >= 0 and parent[i] != root:
            parent[i], i = root, parent[i]
        return root


@dataclass
class Partition:
    """Surjective map original node -> supernode index (the mapping matrix C)."""

    assignment: np.ndarray
    n_c: int
    members: list[list[int]] = field(default_factory=list)

    @classmethod
    def from_assignment(cls, assignment: Sequence[int], n_c: int | None = None) -> "Partition":
        a = np.asarray(assignment, dtype=np.int64)
        if n_c is None:
            n_c = int(a.max()) + 1 if a.size else 0
        members: list[list[int]] = [[] for _ in range(n_c)]
        for node, sup in enumerate(a.tolist()):
            if 0 <= sup < n_c:
                members[sup].append(node)
        return cls(a, n_c, members)


@dataclass
class ValidationReport:
    checks: dict[str, bool]
    messages: list[str]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def validate_partition(p: Partition, n: int) -> ValidationReport:
    """Check the mapping-matrix constraints; failures are reported, never raised."""
    a = np.asarray(p.assignment)
    messages = []
    assigned = a.shape == (n,)
    if not assigned:
        messages.append(f"assignment covers {a.size} nodes, expected {n}")
    in_range = bool(a.size == 0 or (a.min() >= 0 and a.max() < p.n_c))
    if not in_range:
        messages.append(f"assignment values outside 0..{p.n_c - 1}")
    counts = np.bincount(a[(a >= 0) & (a < p.n_c)], minlength=p.n_c) if p.n_c > 0 else np.zeros(0)
    nonempty = p.n_c >= 1 and bool(np.all(counts >= 1))
    if not nonempty:
        empty = np.flatnonzero(counts == 0).tolist() if p.n_c > 0 else []
        messages.append(f"empty supernodes: {empty}")
    members_ok = len(p.members) == p.n_c and all(
        sorted(mem) == np.flatnonzero(a == k).tolist() for k, mem in enumerate(p.members))
    if not members_ok:
        messages.append("member lists are not the preimages of the assignment")
    checks = {
        "every_node_assigned": assigned,
        "assignment_in_range": in_range,
        "no_empty_supernode": nonempty,
        "members_match_assignment": members_ok,
    }
    return ValidationReport(checks, messages)


def coarsening_rate(n: int, n_c: int) -> float:
    if not (1 <= n_c <= n):
        raise ValueError(f"need 1 <= n_c <= n, got n={n}, n_c={n_c}")
    return 1.0 - n_c / n


@dataclass(frozen=True)
class CoarsenedGraph:
    graph: StaticGraph
    features: np.ndarray
    partition: Partition
    ratio_achieved: float


def extract_coarse_graph(state: CoarseningState, original: StaticGraph) -> CoarsenedGraph:
    """Materialize the coarse graph from the current state.

    Supernodes are numbered in order of their smallest original member, so the
    labeling does not depend on internal merge ids.
    """
    roots = [state.find_root(i) for i in range(original.n)]
    relabel: dict[int, int] = {}
    for r in roots:
        if r not in relabel:
            relabel[r] = len(relabel)
    live = list(relabel)  # live ids, indexed by new label
    assignment = np.fromiter((relabel[r] for r in roots), dtype=np.int64, count=original.n)
    partition = Partition.from_assignment(assignment, len(live))
    edges = [(relabel[a], relabel[b]) for a in live for b in state.nbr[a] if a < b]
    graph = StaticGraph.from_edges(len(live), edges)
    features = state.x[live].copy() if live else np.zeros((0, state.d))
    ratio = coarsening_rate(original.n, len(live)) if original.n else 0.0
    return CoarsenedGraph(graph, features, partition, ratio)
