"""Command-line entry point for instance generation, experiment plans, and scans."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from .experiments import (
    AGG_COLUMNS,
    ExperimentPlan,
    aggregate,
    read_raw_csv,
    run_plan,
)
from .graph import generate_ba_graph, read_graph, write_graph
from .hamiltonian import ExtremeEigenSolver, maxcut_objective, normalize_energy
from .landscape import (
    default_grid_size,
    gaps_for_scan,
    period_grid,
    scan_circuit_parameter,
)
from .seeds import rng_for
from .simulator import QaoaParams

log = logging.getLogger(__name__)


def _add_plan_output_args(p):
    p.add_argument("--samples", type=int, default=30)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--graph-reuse", choices=["per-sample", "shared"], default="per-sample")


def _cmd_gen_graphs(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(args.count):
        g = generate_ba_graph(args.nodes, args.m, rng_for(args.seed, "graph", args.nodes, i))
        path = out / f"ba_n{args.nodes}_s{args.seed}_{i}.json"
        write_graph(g, path)
        print(path)


def _cmd_run(args):
    plan = ExperimentPlan.from_json(Path(args.plan).read_text())
    paths = run_plan(plan, workers=args.workers)
    print(paths.raw_csv)
    print(paths.aggregate_csv)


def _run_inline_plan(args, **fields):
    plan = ExperimentPlan(
        samples=args.samples,
        master_seed=args.seed,
        graph_reuse=args.graph_reuse,
        out_dir=args.out,
        **fields,
    )
    paths = run_plan(plan, workers=args.workers)
    print(paths.raw_csv)
    print(paths.aggregate_csv)


def _cmd_sweep_alpha_init(args):
    _run_inline_plan(
        args,
        nodes=args.nodes,
        layers=[args.layers],
        strategies=["hoho"],
        inits=args.inits,
        alpha_inits=args.alpha_inits,
        alpha_steps=[args.alpha_step],
    )


def _cmd_sweep_alpha_step(args):
    _run_inline_plan(
        args,
        nodes=args.nodes,
        layers=[args.layers],
        strategies=["hoho"],
        inits=args.inits,
        alpha_inits=[args.alpha_init],
        alpha_steps=args.alpha_steps,
    )


def _cmd_benchmark(args):
    _run_inline_plan(
        args,
        nodes=args.nodes,
        layers=args.layers,
        strategies=args.strategies,
        inits=[args.init],
        alpha_inits=[args.alpha_init],
        alpha_steps=[args.alpha_step],
    )


def _cmd_scan_landscape(args):
    g = read_graph(args.instance)
    diag = maxcut_objective(g)
    rng = rng_for(args.seed, "scan")
    params = QaoaParams(
        gammas=rng.uniform(0.0, 6.283185307179586, args.layers),
        betas=rng.uniform(0.0, 6.283185307179586, args.layers),
    )
    size = args.grid_size
    if size is None:
        gaps = gaps_for_scan(diag, args.param)
        size = default_grid_size(float(gaps.max()))
    scan = scan_circuit_parameter(
        diag, params, args.layer, args.param, period_grid(size), alpha=args.alpha
    )
    lo, hi = ExtremeEigenSolver(diag).extremes(args.alpha)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "energy", "e_norm"])
        for theta, e in zip(scan.thetas, scan.energies):
            writer.writerow(
                [repr(float(theta)), repr(float(e)), repr(normalize_energy(float(e), lo, hi))]
            )
    print(args.out)


def _cmd_aggregate(args):
    rows = aggregate(read_raw_csv(args.raw))
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGG_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.strategy, r.n, r.layers, r.init_kind,
                    "" if r.alpha_init is None else repr(r.alpha_init),
                    "" if r.alpha_step is None else repr(r.alpha_step),
                    r.count, repr(r.median), repr(r.q1), repr(r.q3),
                    repr(r.best), repr(r.mean), repr(r.std),
                ]
            )
    print(args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homotopy-qaoa",
        description="Homotopy-scheduled QAOA experiments on weighted Max-Cut instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graphs", help="write random weighted instances as JSON files")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen_graphs)

    p = sub.add_parser("run", help="execute an experiment plan from a JSON file")
    p.add_argument("--plan", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep-alpha-init", help="homotopy sweep over starting alpha values")
    p.add_argument("--nodes", type=int, nargs="+", default=[6, 10])
    p.add_argument("--layers", type=int, default=3)
    p.add_argument("--alpha-inits", type=float, nargs="+",
                   default=[0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
    p.add_argument("--alpha-step", type=float, default=0.05)
    p.add_argument("--inits", nargs="+", default=["ZR"])
    _add_plan_output_args(p)
    p.set_defaults(func=_cmd_sweep_alpha_init)

    p = sub.add_parser("sweep-alpha-step", help="homotopy sweep over alpha step sizes")
    p.add_argument("--nodes", type=int, nargs="+", default=[6, 10])
    p.add_argument("--layers", type=int, default=10)
    p.add_argument("--alpha-steps", type=float, nargs="+",
                   default=[0.005, 0.01, 0.05, 0.1, 0.25, 0.5])
    p.add_argument("--alpha-init", type=float, default=0.0)
    p.add_argument("--inits", nargs="+", default=["ZR"])
    _add_plan_output_args(p)
    p.set_defaults(func=_cmd_sweep_alpha_step)

    p = sub.add_parser("benchmark", help="compare strategies over nodes and layers")
    p.add_argument("--nodes", type=int, nargs="+", default=[10])
    p.add_argument("--layers", type=int, nargs="+", default=[5, 10, 20])
    p.add_argument("--strategies", nargs="+", default=["qaoa", "tqaoa", "hoho"])
    p.add_argument("--init", default="ZR")
    p.add_argument("--alpha-init", type=float, default=0.0)
    p.add_argument("--alpha-step", type=float, default=0.01)
    _add_plan_output_args(p)
    p.set_defaults(func=_cmd_benchmark)

    p = sub.add_parser("scan-landscape", help="energy curve of one swept angle")
    p.add_argument("--instance", required=True, help="graph JSON file")
    p.add_argument("--layer", type=int, required=True, help="0-based layer index")
    p.add_argument("--param", choices=["gamma", "beta"], required=True)
    p.add_argument("--grid-size", type=int, default=None,
                   help="grid points over one period (default: resolve all gaps)")
    p.add_argument("--layers", type=int, default=3, help="circuit depth")
    p.add_argument("--seed", type=int, default=0, help="seed of the frozen random angles")
    p.add_argument("--alpha", type=float, default=1.0, help="observable mixture")
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=_cmd_scan_landscape)

    p = sub.add_parser("aggregate", help="aggregate a raw CSV into per-cell statistics")
    p.add_argument("--raw", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_aggregate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
