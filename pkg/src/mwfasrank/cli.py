"""Command-line interface: ``mwfasrank {rank,suite,oracle-check,losses}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import losses
from ._backend import BACKENDS
from .bench import (
    EXIT_FATAL,
    EXIT_OK,
    EXIT_PARTIAL,
    PipelineError,
    PipelineOptions,
    records_to_csv,
    records_to_table,
    run_oracle_check,
    run_pipeline,
    run_suite,
)
from .graph import EdgeListError, read_edge_list, resolve_data_path
from .ranking import read_ranking, write_ranking


def _pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--optimize-ratio", action="store_true", help="refine scores to lower ratio loss")
    p.add_argument("--sweeps", type=int, default=40, help="optimizer sweeps (default 40)")
    p.add_argument("--ternary-steps", type=int, default=100, help="ternary iterations per vertex")
    p.add_argument("--loss-epsilon", type=float, default=losses.DEFAULT_EPSILON,
                   help="epsilon of the ratio loss (default 1e-6)")
    p.add_argument("--zero-threshold", type=float, default=1e-9,
                   help="residual weight treated as zero during cancellation")
    p.add_argument("--no-guard", action="store_true",
                   help="keep optimizer updates even when they raise the loss")
    p.add_argument("--output", "-o", type=Path)
    p.add_argument("--format", choices=("csv", "table"), default="table")
    p.add_argument("--backend", choices=sorted(BACKENDS), default=None)


def _options(args) -> PipelineOptions:
    return PipelineOptions(
        optimize_ratio=args.optimize_ratio,
        sweeps=args.sweeps,
        ternary_steps=args.ternary_steps,
        loss_epsilon=args.loss_epsilon,
        zero_threshold=args.zero_threshold,
        guard_monotone=not args.no_guard,
        backend=args.backend,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwfasrank",
        description="Rank items from weighted pairwise comparisons via a feedback arc set.",
        epilog="Relative dataset paths are also looked up under $MWFASRANK_DATA_DIR.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rank", help="rank one edge-list file")
    p.add_argument("edgelist")
    _pipeline_flags(p)

    p = sub.add_parser("suite", help="rank every dataset listed in a manifest")
    p.add_argument("manifest")
    _pipeline_flags(p)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--omit-timing", action="store_true",
                   help="leave the time column empty so reruns are byte-identical")

    p = sub.add_parser("oracle-check", help="compare the heuristic with exhaustive search")
    p.add_argument("--instances", type=int, default=500)
    p.add_argument("--max-vertices", type=int, default=6)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--min-weight", type=int, default=1)
    p.add_argument("--max-weight", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--backend", choices=sorted(BACKENDS), default=None)

    p = sub.add_parser("losses", help="evaluate a ranking file against an edge list")
    p.add_argument("edgelist")
    p.add_argument("ranking")
    p.add_argument("--loss-epsilon", type=float, default=losses.DEFAULT_EPSILON)
    p.add_argument("--format", choices=("csv", "table"), default="table")
    return parser


def cmd_rank(args) -> int:
    try:
        result = run_pipeline(args.edgelist, _options(args))
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    if args.output is not None:
        with open(args.output, "w", encoding="utf-8") as fh:
            write_ranking(result.ranking, result.graph.labels, fh)
    else:
        write_ranking(result.ranking, result.graph.labels, sys.stdout)
        sys.stdout.write("\n")
    records = [result.record]
    if args.format == "csv":
        sys.stdout.write(records_to_csv(records, with_average=False))
    else:
        sys.stdout.write(records_to_table(records, with_average=False))
    return EXIT_OK


def cmd_suite(args) -> int:
    try:
        records = run_suite(args.manifest, _options(args), jobs=args.jobs)
    except (OSError, ValueError) as exc:
        print(f"error: cannot read manifest: {exc}", file=sys.stderr)
        return EXIT_FATAL
    csv_text = records_to_csv(records, omit_timing=args.omit_timing)
    if args.output is not None:
        args.output.write_text(csv_text, encoding="utf-8")
    sys.stdout.write(csv_text if args.format == "csv" else records_to_table(records))
    return EXIT_PARTIAL if any(r.error for r in records) else EXIT_OK


def cmd_oracle_check(args) -> int:
    try:
        report = run_oracle_check(
            instances=args.instances,
            max_vertices=args.max_vertices,
            edge_prob=args.edge_prob,
            weight_range=(args.min_weight, args.max_weight),
            seed=args.seed,
            backend=args.backend,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    sys.stdout.write(report.summary())
    if not report.ok:
        sys.stderr.write("# failing instance (edge list)\n" + (report.failing_instance or ""))
        return EXIT_FATAL
    return EXIT_OK


def cmd_losses(args) -> int:
    try:
        graph = read_edge_list(resolve_data_path(args.edgelist))
        ranking = read_ranking(args.ranking, graph)
        report = losses.evaluate(graph, ranking, args.loss_epsilon)
    except (OSError, EdgeListError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    d = report.as_dict()
    if args.format == "csv":
        sys.stdout.write(",".join(d) + "\n" + ",".join(repr(v) for v in d.values()) + "\n")
    else:
        for k, v in d.items():
            if k == "epsilon":
                sys.stdout.write(f"{k:<10} {v:g}\n")
            elif isinstance(v, float):
                sys.stdout.write(f"{k:<10} {v:.2f}\n")
            else:
                sys.stdout.write(f"{k:<10} {v}\n")
    return EXIT_OK


COMMANDS = {
    "rank": cmd_rank,
    "suite": cmd_suite,
    "oracle-check": cmd_oracle_check,
    "losses": cmd_losses,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
