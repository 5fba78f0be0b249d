"""Readers and writers for edge lists, feature matrices, and run outputs.

Binary feature layout (little-endian)::

    8 bytes   magic  b"NOPEFEAT"
    u64       n (rows)
    u64       d (columns)
    n*d f64   values, row-major
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .coarsen import CoarseningResult, MergeRecord
from .synth import RNG_NAME
from .graph import CoarsenedGraph, Partition, StaticGraph, check_features

log = logging.getLogger(__name__)

FEATURE_MAGIC = b"NOPEFEAT"
_HEADER = struct.Struct("<8sQQ")


def fmt_float(v: float) -> str:
    """17 significant digits: enough to round-trip any float64."""
    return format(float(v), ".17g")


@dataclass
class EdgeList:
    edges: np.ndarray
    n: int
    self_loops_dropped: int


def parse_edge_list(path, num_nodes: int | None = None) -> EdgeList:
    edges = []
    loops = 0
    max_id = -1
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {text!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer node id in {text!r}") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id in {text!r}")
            max_id = max(max_id, u, v)
            if u == v:
                loops += 1
                continue
            edges.append((u, v))
    n = max_id + 1
    if num_nodes is not None:
        if num_nodes < n:
            raise ValueError(f"{path}: --num-nodes {num_nodes} is smaller than max id + 1 = {n}")
        n = num_nodes
    arr = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return EdgeList(arr, n, loops)


def read_edge_list(path, num_nodes: int | None = None) -> StaticGraph:
    """Whitespace-separated ``u v`` per line; ``#`` comments allowed.

    Self-loops are dropped (with a logged count) and duplicates merged.
    """
    el = parse_edge_list(path, num_nodes)
    if el.self_loops_dropped:
        log.warning("%s: dropped %d self-loop(s)", path, el.self_loops_dropped)
    return StaticGraph.from_edges(el.n, el.edges)


def write_edge_list(path, graph: StaticGraph) -> None:
    with open(path, "w") as fh:
        for u, v in graph.edge_array().tolist():
            fh.write(f"{u} {v}\n")


def read_features(path, expected_n: int | None = None) -> np.ndarray:
    """CSV (one row per node) or the binary layout in the module docstring."""
    with open(path, "rb") as fh:
        head = fh.read(len(FEATURE_MAGIC))
    if head == FEATURE_MAGIC:
        x = _read_features_binary(path)
    else:
        x = _read_features_csv(path)
    if expected_n is not None and x.shape[0] != expected_n:
        raise ValueError(f"{path}: {x.shape[0]} feature rows, expected {expected_n}")
    try:
        return check_features(x)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _read_features_csv(path) -> np.ndarray:
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise ValueError(f"{path}:{lineno}: ragged row ({len(row)} columns, expected {width})")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-numeric value") from None
    if not rows:
        raise ValueError(f"{path}: no feature rows")
    return np.asarray(rows, dtype=np.float64)


def _read_features_binary(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, n, d = _HEADER.unpack(fh.read(_HEADER.size))
        data = np.fromfile(fh, dtype="<f8")
    if data.size != n * d:
        raise ValueError(f"{path}: header says {n}x{d} but file holds {data.size} values")
    return data.reshape(n, d).astype(np.float64)


def write_features_binary(path, features) -> None:
    x = np.ascontiguousarray(features, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(FEATURE_MAGIC, x.shape[0], x.shape[1]))
        x.tofile(fh)


def write_features_csv(path, features) -> None:
    with open(path, "w") as fh:
        for row in np.asarray(features).tolist():
            fh.write(",".join(fmt_float(v) for v in row) + "\n")


def write_partition(path, partition: Partition) -> None:
    with open(path, "w") as fh:
        for node, sup in enumerate(np.asarray(partition.assignment).tolist()):
            fh.write(f"{node}\t{sup}\n")


def read_partition(path) -> Partition:
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            a, b = line.rstrip("\n").split("\t")
            pairs.append((int(a), int(b)))
    pairs.sort()
    if [p[0] for p in pairs] != list(range(len(pairs))):
        raise ValueError(f"{path}: node ids are not 0..{len(pairs) - 1}")
    return Partition.from_assignment([p[1] for p in pairs])


def _num(v: float | None) -> str:
    return "null" if v is None or not np.isfinite(v) else fmt_float(v)


def write_trace(path, trace: list[MergeRecord]) -> None:
    """One JSON object per merge; floats carry 17 significant digits."""
    with open(path, "w") as fh:
        for r in trace:
            fh.write(f'{{"round": {r.round}, "u": {r.u}, "v": {r.v}, "w": {r.w}, '
                     f'"score": {_num(r.score)}, "exact_interference": {_num(r.exact_interference)}}}\n')


def read_trace(path) -> list[MergeRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                score = float("nan") if d["score"] is None else float(d["score"])
                out.append(MergeRecord(d["round"], d["u"], d["v"], d["w"], score,
                                       None if d["exact_interference"] is None
                                       else float(d["exact_interference"])))
    return out


def _json_float(v: float):
    # json writes the shortest round-trip repr, which is already lossless
    return v if np.isfinite(v) else None


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def array_digest(*arrays) -> str:
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a)
        h.update(str(a.dtype).encode() + str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()


@dataclass
class RunManifest:
    algorithm: str
    target_ratio: float
    achieved_ratio: float
    seed: int
    input_digests: dict[str, str]
    wall_ms: float
    peak_bytes: int
    status: str
    rng: str = RNG_NAME
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_result(cls, result: CoarseningResult, input_digests: dict[str, str],
                    seed: int = 0, **extra) -> "RunManifest":
        cfg = result.config
        return cls(result.algorithm, cfg.ratio if cfg else float("nan"),
                   result.coarse.ratio_achieved, seed, input_digests,
                   result.wall_ms, result.peak_bytes, result.status, extra=extra)


def write_outputs(out_dir, coarse: CoarsenedGraph, trace: list[MergeRecord],
                  report, manifest: RunManifest, metrics: dict | None = None) -> None:
    """Write the standard output set into ``out_dir`` (created if missing)."""
    out = Path(out_dir)
    try:
        os.makedirs(out, exist_ok=True)
        write_partition(out / "partition.tsv", coarse.partition)
        write_edge_list(out / "coarse_edges.txt", coarse.graph)
        write_features_csv(out / "coarse_features.csv", coarse.features)
        write_trace(out / "trace.jsonl", trace)
        payload = dict(metrics or {})
        payload["trajectory"] = report.to_dict() if report is not None else None
        with open(out / "metrics.json", "w") as fh:
            json.dump(jsonable(payload), fh, indent=2)
        with open(out / "manifest.json", "w") as fh:
            json.dump(jsonable(asdict(manifest)), fh, indent=2)
    except OSError as exc:
        raise OSError(f"writing outputs to {out}: {exc}") from exc


def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _json_float(float(obj))
    return obj
