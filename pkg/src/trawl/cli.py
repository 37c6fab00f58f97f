"""Command-line driver.

Runs any bundled app on a file or synthetic graph under either
paradigm, writes sample output and a key=value report, compares the two
paradigms, or runs the statistical validation table.
"""

from __future__ import annotations

import argparse
import sys

from .apps import APP_NAMES
from .bench import RunConfig, compare_paradigms, run, validate_distributions
from .output import LAYOUT_FINAL, LAYOUT_PER_STEP, emit, write_remap


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="trawl",
        description="Graph sampling under sample- or transit-parallel execution.")
    ap.add_argument("--app", choices=APP_NAMES, required=True)
    ap.add_argument("--graph", metavar="PATH", help="edge-list file")
    ap.add_argument("--synth", metavar="SPEC",
                    help="synthetic graph, e.g. powerlaw:10000, path:1000, "
                         "star:1000, cycle:500")
    ap.add_argument("--weighted", action="store_true",
                    help="use file weights; missing ones drawn from [1,5)")
    ap.add_argument("--undirected", action="store_true",
                    help="add the reverse of every input edge")
    ap.add_argument("--paradigm", choices=["sp", "tp"], default="tp")
    ap.add_argument("--samples", type=int, default=1000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--walk-length", type=int, default=None)
    ap.add_argument("--fanouts", default=None, metavar="A,B",
                    help="per-step fanouts for khop")
    ap.add_argument("--p", type=float, default=None, help="node2vec return parameter")
    ap.add_argument("--q", type=float, default=None, help="node2vec in-out parameter")
    ap.add_argument("--term-prob", type=float, default=None,
                    help="ppr termination probability")
    ap.add_argument("--layer-max", type=int, default=None,
                    help="layer sampling size cap")
    ap.add_argument("--layer-step", type=int, default=None,
                    help="layer sampling per-step size")
    ap.add_argument("--batch-size", type=int, default=None,
                    help="roots per sample for batch apps")
    ap.add_argument("--clusters", type=int, default=None,
                    help="clusters per sample for clustergcn")
    ap.add_argument("--output", metavar="PATH", help="sample output file")
    ap.add_argument("--layout", choices=[LAYOUT_FINAL, LAYOUT_PER_STEP],
                    default=LAYOUT_FINAL)
    ap.add_argument("--report", metavar="PATH", help="key=value run report")
    ap.add_argument("--step-cap", type=int, default=10_000,
                    help="hard bound for unbounded apps")
    ap.add_argument("--compare", action="store_true",
                    help="run both paradigms, verify equality, report ratios")
    ap.add_argument("--validate", action="store_true",
                    help="run the app's distribution checks and exit")
    return ap


def app_params_from_args(args) -> dict:
    params: dict = {}
    if args.app in ("deepwalk", "node2vec", "multirw") and args.walk_length:
        params["walk_length"] = args.walk_length
    if args.app == "khop" and args.fanouts:
        params["fanouts"] = [int(x) for x in args.fanouts.split(",") if x]
    if args.app == "node2vec":
        if args.p is not None:
            params["p"] = args.p
        if args.q is not None:
            params["q"] = args.q
    if args.app == "ppr" and args.term_prob is not None:
        params["termination_probability"] = args.term_prob
    if args.app == "layer":
        if args.layer_max is not None:
            params["max_size"] = args.layer_max
        if args.layer_step is not None:
            params["step_size"] = args.layer_step
    if args.app in ("fastgcn", "ladies", "mvs") and args.batch_size is not None:
        params["batch_size"] = args.batch_size
    if args.app == "clustergcn" and args.clusters is not None:
        params["clusters_per_sample"] = args.clusters
    return params


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if not args.graph and not args.synth:
        ap.error("one of --graph or --synth is required")

    config = RunConfig(
        app=args.app,
        app_params=app_params_from_args(args),
        paradigm=args.paradigm,
        graph_path=args.graph,
        synth=args.synth,
        weighted=args.weighted,
        undirected=args.undirected,
        seed=args.seed,
        num_samples=args.samples,
        workers=args.workers,
        layout=args.layout,
        output_path=args.output,
        report_path=args.report,
        step_cap=args.step_cap,
    )

    if args.validate:
        graph = config.load_graph()
        rows = validate_distributions(args.app, graph, seed=args.seed)
        for row in rows:
            print(row.line())
        return 0 if all(r.passed for r in rows) else 1

    graph = config.load_graph()

    if args.compare:
        comparison = compare_paradigms(config, graph)
        for line in comparison.lines():
            print(line)
        if args.report:
            with open(args.report, "w", encoding="utf-8") as fh:
                fh.write("\n".join(comparison.lines()) + "\n")
        return 0

    output, report = run(config, graph)
    if args.output:
        emit(output, args.layout, args.output)
        write_remap(graph.remap, args.output + ".remap")
    if args.report:
        report.write(args.report)
    for line in report.lines()[:15]:
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
