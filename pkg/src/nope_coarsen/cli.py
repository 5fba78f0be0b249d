"""Command-line entry point: ``nope-coarsen {coarsen,compare,bench}``.

Exit codes: 0 complete, 2 target not reached, 1 usage or IO error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .bench import loglog_slope, memory_budget, run_bench
from .coarsen import EngineConfig, coarsen
from .fileio import RunManifest, file_digest, jsonable, read_edge_list, read_features, write_outputs
from .metrics import DEFAULT_EWMA_ALPHA, EBC_MAX_NODES, dirichlet_energy, trajectory_report
from .synth import RNG_NAME

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_TARGET_NOT_REACHED = 2

CLI_ALGORITHMS = {"nope": "nope", "nope-star": "nope_star", "selfish-cosine": "selfish_cosine"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _ratio(text: str) -> float:
    r = float(text)
    if not (0.0 < r < 1.0):
        raise argparse.ArgumentTypeError(f"ratio must lie in (0, 1), got {text}")
    return r


def _algorithm(text: str) -> str:
    if text not in CLI_ALGORITHMS:
        raise argparse.ArgumentTypeError(f"unknown algorithm {text!r}; choose from {sorted(CLI_ALGORITHMS)}")
    return CLI_ALGORITHMS[text]


def _algorithm_list(text: str) -> list[str]:
    return [_algorithm(t.strip()) for t in text.split(",") if t.strip()]


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def _add_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", required=True, type=Path, help="edge list, one 'u v' per line")
    p.add_argument("--features", required=True, type=Path, help="CSV or binary feature matrix")
    p.add_argument("--num-nodes", type=int, default=None, help="node count if trailing ids are isolated")
    p.add_argument("--ratio", required=True, type=_ratio, help="target coarsening rate r in (0, 1)")
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nope-coarsen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coarsen", help="run one engine and write its outputs")
    _add_inputs(p)
    p.add_argument("--algorithm", type=_algorithm, default="nope", help="nope | nope-star | selfish-cosine")
    p.add_argument("--trace", action="store_true", help="record the per-merge trace")
    p.add_argument("--trace-exact", action="store_true",
                   help="recompute exact interference per merge (implies --trace)")
    p.add_argument("--checkpoint-stride", type=int, default=0,
                   help="with --trace-exact, metric checkpoints every K merges (0: start and end only)")
    p.add_argument("--ewma-alpha", type=float, default=DEFAULT_EWMA_ALPHA)
    p.add_argument("--ebc", action="store_true", help="include average edge betweenness checkpoints")

    p = sub.add_parser("compare", help="run several engines on the same input and pair their trajectories")
    _add_inputs(p)
    p.add_argument("--algorithms", type=_algorithm_list, default=["nope", "selfish_cosine"])
    p.add_argument("--checkpoint-stride", type=int, default=50)
    p.add_argument("--ewma-alpha", type=float, default=DEFAULT_EWMA_ALPHA)
    p.add_argument("--no-ebc", action="store_true", help="skip edge betweenness checkpoints")

    p = sub.add_parser("bench", help="time engines on synthetic graphs of growing size")
    p.add_argument("--sizes", type=_int_list, required=True, help="comma-separated node counts")
    p.add_argument("--avg-degree", type=float, default=8.0)
    p.add_argument("--dim", type=int, default=32)
    p.add_argument("--ratio", type=_ratio, default=0.5)
    p.add_argument("--algorithms", type=_algorithm_list, default=["nope_star"])
    p.add_argument("--graph", choices=["er", "planted"], default="er")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)
    return parser


def _load(args):
    graph = read_edge_list(args.edges, args.num_nodes)
    features = read_features(args.features, graph.n)
    digests = {"edges": file_digest(args.edges), "features": file_digest(args.features)}
    return graph, features, digests


def _final_metrics(result) -> dict:
    g = result.coarse.graph
    return {
        "supernodes": g.n,
        "coarse_edges": g.m,
        "dirichlet_energy": dirichlet_energy(g, result.coarse.features) if g.m else None,
    }


def cmd_coarsen(args) -> int:
    graph, features, digests = _load(args)
    exact = args.trace_exact
    config = EngineConfig(args.algorithm, args.ratio, args.seed,
                          record_trace=args.trace or exact or args.checkpoint_stride > 0,
                          recompute_exact_in_trace=exact)
    result = coarsen(graph, features, config)
    report = None
    if exact:
        stride = args.checkpoint_stride or max(1, len(result.trace))
        report = trajectory_report(graph, features, result, stride, args.ewma_alpha, with_ebc=args.ebc)
    manifest = RunManifest.from_result(result, digests, args.seed, target_nodes=result.target)
    write_outputs(args.out, result.coarse, result.trace, report, manifest, _final_metrics(result))
    print(f"{args.algorithm}: status={result.status} supernodes={result.coarse.graph.n} "
          f"achieved_ratio={result.coarse.ratio_achieved:.6f} wall_ms={result.wall_ms:.1f} "
          f"peak_bytes={result.peak_bytes}")
    return EXIT_OK if result.complete else EXIT_TARGET_NOT_REACHED


def cmd_compare(args) -> int:
    graph, features, digests = _load(args)
    combined = {"ratio": args.ratio, "checkpoint_stride": args.checkpoint_stride,
                "ewma_alpha": args.ewma_alpha, "algorithms": [], "status": {},
                "dirichlet": {}, "avg_ebc": {}, "smoothed_interference": {}}
    all_complete = True
    for alg in args.algorithms:
        config = EngineConfig(alg, args.ratio, args.seed, record_trace=True, recompute_exact_in_trace=True)
        result = coarsen(graph, features, config)
        report = trajectory_report(graph, features, result, args.checkpoint_stride, args.ewma_alpha,
                                   with_ebc=not args.no_ebc, ebc_max_nodes=EBC_MAX_NODES)
        manifest = RunManifest.from_result(result, digests, args.seed)
        write_outputs(args.out / alg, result.coarse, result.trace, report, manifest, _final_metrics(result))
        combined["algorithms"].append(alg)
        combined["status"][alg] = result.status
        combined["dirichlet"][alg] = [list(c) for c in report.dirichlet_checkpoints]
        combined["avg_ebc"][alg] = [list(c) for c in report.ebc_checkpoints]
        combined["smoothed_interference"][alg] = report.smoothed
        all_complete &= result.complete
        print(f"{alg}: status={result.status} merges={len(result.trace)} "
              f"checkpoints={len(report.dirichlet_checkpoints)} wall_ms={result.wall_ms:.1f}")
    with open(args.out / "compare.json", "w") as fh:
        json.dump(jsonable(combined), fh, indent=1)
    return EXIT_OK if all_complete else EXIT_TARGET_NOT_REACHED


def cmd_bench(args) -> int:
    args.out.mkdir(parents=True, exist_ok=True)

    def progress(row):
        print(f"n={row.n} m={row.m} {row.algorithm}: wall_ms={row.wall_ms:.1f} "
              f"peak_bytes={row.peak_bytes} budget={memory_budget(row.n, args.dim, row.m)}", flush=True)

    rows = run_bench(args.sizes, args.algorithms, args.avg_degree, args.dim, args.ratio,
                     args.seed, args.graph, args.repeats, progress)
    with open(args.out / "bench.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "algorithm", "wall_ms", "peak_bytes"])
        for r in rows:
            w.writerow([r.n, r.algorithm, f"{r.wall_ms:.3f}", r.peak_bytes])
    summary = {"slopes": {}, "speedup": {}, "rng": RNG_NAME, "graph": args.graph,
               "avg_degree": args.avg_degree, "dim": args.dim, "ratio": args.ratio, "seed": args.seed}
    for alg in args.algorithms:
        mine = [r for r in rows if r.algorithm == alg]
        slope = loglog_slope([r.n for r in mine], [r.wall_ms for r in mine])
        summary["slopes"][alg] = slope
        print(f"{alg}: log-log slope = {'absent' if slope is None else f'{slope:.3f}'}")
    if "nope" in args.algorithms and "nope_star" in args.algorithms:
        for n in args.sizes:
            t = {r.algorithm: r.wall_ms for r in rows if r.n == n}
            summary["speedup"][str(n)] = t["nope"] / t["nope_star"]
            print(f"n={n}: nope / nope-star wall time = {summary['speedup'][str(n)]:.2f}")
    with open(args.out / "bench.json", "w") as fh:
        json.dump(summary, fh, indent=1)
    return EXIT_OK if all(r.status == "complete" for r in rows) else EXIT_TARGET_NOT_REACHED


COMMANDS = {"coarsen": cmd_coarsen, "compare": cmd_compare, "bench": cmd_bench}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError) as exc:
        print(f"nope-coarsen: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
