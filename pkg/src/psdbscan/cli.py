"""Command-line interface: cluster, gen, and bench subcommands.

Exit codes: 0 success, 1 usage error, 2 data/input error, 3 protocol error.
Each clustering run emits one metrics JSON object (to --metrics-out or
stdout).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from .datagen import calibrate_eps, gen_blobs, gen_chain, gen_with_target_degree
from .errors import DataError, InputError, ProtocolError
from .fileio import parse_linkage_file, parse_vector_file, write_labels, write_metrics, write_vector_file
from .neighborhood import build_neighbor_graph
from .p2p import run_p2p_dbscan
from .ps import run_ps_dbscan
from .sequential import NOISE, sequential_dbscan

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROTOCOL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> _Parser:
    parser = _Parser(prog="psdbscan", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("cluster", help="cluster a vector or linkage file")
    c.add_argument("--engine", choices=("ps", "p2p", "sequential"), required=True)
    c.add_argument("--input", required=True)
    c.add_argument("--input-type", choices=("vector", "linkage"), default="vector")
    c.add_argument("--num-points", type=int, help="point count for linkage input (default: max id + 1)")
    c.add_argument("--dim", type=int, help="expected dimension of vector input (validated)")
    c.add_argument("--epsilon", type=float)
    c.add_argument("--min-pts", type=int, required=True)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--mode", choices=("simulated", "concurrent"), default="simulated")
    c.add_argument("--partition", choices=("random", "contiguous"), default="random")
    c.add_argument("--output", help="write labels CSV here")
    c.add_argument("--metrics-out", help="write metrics JSON here instead of stdout")
    # Resource-shape knobs: accepted and recorded, never interpreted (one
    # simulated server regardless).
    c.add_argument("--servers", type=int)
    c.add_argument("--server-cores", type=int)
    c.add_argument("--worker-cores", type=int)
    c.add_argument("--server-memory")
    c.add_argument("--worker-memory")

    g = sub.add_parser("gen", help="generate a synthetic vector dataset")
    g.add_argument("--kind", choices=("blobs", "degree", "chain"), required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--clusters", type=int, default=4)
    g.add_argument("--spread", type=float, default=0.3)
    g.add_argument("--target-degree", type=float, default=25.0)
    g.add_argument("--span-workers", type=int, default=8)

    b = sub.add_parser("bench", help="sweep workers x datasets, compare message counts")
    b.add_argument("--suite", choices=("chain", "blobs", "both"), default="both")
    b.add_argument("--n", type=int, default=20000)
    b.add_argument("--workers", default="4,8,16,32", help="comma-separated worker counts")
    b.add_argument("--min-pts", type=int, default=4)
    b.add_argument("--avg-degree", type=float, default=15.0, help="calibrated blob neighborhood size")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", help="write the table as JSON here")
    return parser


def _cmd_cluster(args) -> int:
    if args.input_type == "linkage":
        if args.epsilon is not None:
            print("psdbscan cluster: error: --epsilon cannot be combined with linkage input", file=sys.stderr)
            return EXIT_USAGE
        data = parse_linkage_file(args.input, args.num_points)
        eps = None
    else:
        if args.epsilon is None:
            print("psdbscan cluster: error: vector input requires --epsilon", file=sys.stderr)
            return EXIT_USAGE
        dataset = parse_vector_file(args.input)
        if args.dim is not None and dataset.dim != args.dim:
            raise DataError(f"{args.input}: dimension is {dataset.dim}, expected {args.dim}")
        data = dataset
        eps = args.epsilon

    start = time.perf_counter()
    if args.engine == "ps":
        result, metrics = run_ps_dbscan(
            data,
            eps,
            min_points=args.min_pts,
            num_workers=args.workers,
            seed=args.seed,
            partition=args.partition,
            mode=args.mode,
        )
        payload = metrics.to_dict()
    elif args.engine == "p2p":
        result, metrics = run_p2p_dbscan(
            data,
            eps,
            min_points=args.min_pts,
            num_workers=args.workers,
            seed=args.seed,
            partition=args.partition,
        )
        payload = metrics.to_dict()
    else:
        graph = data if eps is None else build_neighbor_graph(data, eps)
        result = sequential_dbscan(graph, args.min_pts)
        payload = {"rounds": 0, "entries_pushed": 0, "entries_pulled": 0, "modeled_bytes": 0, "per_round": []}
    wall_ms = 1000.0 * (time.perf_counter() - start)

    payload.update(
        engine=args.engine,
        n=int(result.labels.shape[0]),
        num_clusters=result.num_clusters,
        num_noise=int((result.labels == NOISE).sum()),
        num_workers=args.workers,
        seed=args.seed,
        mode=args.mode,
        partition=args.partition,
        wall_ms=wall_ms,
    )
    resources = {
        k: getattr(args, k)
        for k in ("servers", "server_cores", "worker_cores", "server_memory", "worker_memory")
        if getattr(args, k) is not None
    }
    if resources:
        payload["resources"] = resources

    if args.output:
        write_labels(args.output, result)
    if args.metrics_out:
        write_metrics(args.metrics_out, payload)
        print(f"clusters={result.num_clusters} noise={payload['num_noise']} points={payload['n']}")
    else:
        print(json.dumps(payload, sort_keys=True))
    return EXIT_OK


def _cmd_gen(args) -> int:
    info = {"kind": args.kind, "n": args.n, "seed": args.seed, "out": args.out}
    if args.kind == "blobs":
        dataset = gen_blobs(args.n, args.dim, args.clusters, args.spread, args.seed)
    elif args.kind == "degree":
        dataset, eps = gen_with_target_degree(args.n, args.target_degree, args.seed)
        info["eps"] = eps
    else:
        dataset, eps, hint = gen_chain(args.n, args.span_workers, args.seed)
        info["eps"] = eps
        info["partition_hint"] = hint
    write_vector_file(args.out, dataset)
    info["dim"] = dataset.dim
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def _bench_instances(args):
    if args.suite in ("chain", "both"):
        dataset, eps, _ = gen_chain(args.n, max(_parse_workers(args.workers)), args.seed)
        yield "chain", dataset, eps, 2
    if args.suite in ("blobs", "both"):
        dataset = gen_blobs(args.n, 2, 4, 0.3, args.seed)
        eps = calibrate_eps(dataset, args.avg_degree)
        yield "blobs", dataset, eps, args.min_pts


def _parse_workers(spec: str) -> list[int]:
    try:
        return [int(tok) for tok in spec.split(",") if tok]
    except ValueError:
        raise InputError(f"bad --workers list: {spec!r}") from None


def _cmd_bench(args) -> int:
    worker_counts = _parse_workers(args.workers)
    rows = []
    graphs = [
        (name, build_neighbor_graph(dataset, eps), min_pts)
        for name, dataset, eps, min_pts in _bench_instances(args)
    ]
    for w in worker_counts:
        total_p2p = 0
        total_ps = 0
        for name, graph, min_pts in graphs:
            _, ps_metrics = run_ps_dbscan(
                graph, min_points=min_pts, num_workers=w, seed=args.seed
            )
            _, p2p_metrics = run_p2p_dbscan(
                graph, min_points=min_pts, num_workers=w, seed=args.seed
            )
            total_p2p += p2p_metrics.entries_pushed
            total_ps += ps_metrics.entries_pushed
            rows.append(
                {
                    "dataset": name,
                    "workers": w,
                    "p2p_messages": p2p_metrics.entries_pushed,
                    "ps_entries_pushed": ps_metrics.entries_pushed,
                    "ps_rounds": ps_metrics.rounds,
                    "speedup": p2p_metrics.entries_pushed / max(ps_metrics.entries_pushed, 1),
                }
            )
        if len(graphs) > 1:
            rows.append(
                {
                    "dataset": "all",
                    "workers": w,
                    "p2p_messages": total_p2p,
                    "ps_entries_pushed": total_ps,
                    "ps_rounds": None,
                    "speedup": total_p2p / max(total_ps, 1),
                }
            )

    header = f"{'dataset':<10} {'workers':>7} {'p2p_msgs':>12} {'ps_pushed':>12} {'ps_rounds':>9} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for r in rows:
        rounds = "" if r["ps_rounds"] is None else r["ps_rounds"]
        print(
            f"{r['dataset']:<10} {r['workers']:>7} {r['p2p_messages']:>12} "
            f"{r['ps_entries_pushed']:>12} {rounds:>9} {r['speedup']:>9.2f}"
        )
    if args.out:
        write_metrics(args.out, {"rows": rows})
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        if args.command == "cluster":
            return _cmd_cluster(args)
        if args.command == "gen":
            return _cmd_gen(args)
        return _cmd_bench(args)
    except (DataError, InputError, OSError) as exc:
        print(f"psdbscan: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ProtocolError as exc:
        print(f"psdbscan: protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL


if __name__ == "__main__":
    sys.exit(main())
