"""Command-line front end.

Subcommands: generate, preprocess, solve, export-milp, validate, bench,
render. Exit codes: 0 success, 2 validation failure, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dp import ResourceCapExceeded, solve_dp
from .geometry import InstanceError, PickingInstance
from .graph import TourValidationError, build_steiner_graph
from .instances import FormatError, generate, parse, parse_class, serialize
from .milp import (
    build_scf,
    build_scfs,
    build_strengthened_scfs,
    complete_pattern_variables,
    emit_lp,
    enumerate_cuts,
    feasibility_check,
    parse_lp,
)
from .oracle import CapExceeded, held_karp
from .preprocess import identity_reduction, one_spanner, reduce_plain, reduce_with_constraints
from .render import render_svg

from . import metric_closure

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RESOURCE_CAP = 3


def _vertex_ref(vertex) -> dict:
    if vertex.kind == "product":
        return {"kind": "product", "a": vertex.aisle, "b": vertex.block, "o": vertex.offset}
    if vertex.kind == "depot":
        return {"kind": "depot"}
    return {"kind": "intersection", "a": vertex.aisle, "c": vertex.cross_aisle}


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _read_instance(path: str) -> PickingInstance:
    return parse(Path(path).read_text(encoding="utf-8"))


def _cmd_generate(args) -> int:
    cls = parse_class(args.cls)
    if args.slots is not None:
        from dataclasses import replace

        cls = replace(cls, slots_per_subaisle=args.slots)
    instance = generate(cls, args.seed)
    _write(args.out, serialize(instance))
    return EXIT_OK


def _cmd_preprocess(args) -> int:
    instance = _read_instance(args.infile)
    doc = json.loads(serialize(instance))
    if args.mode == "plain":
        doc = json.loads(serialize(reduce_plain(instance)))
    elif args.mode in ("constraints", "all"):
        red = reduce_with_constraints(instance)
        doc = json.loads(serialize(red.instance))
        doc["forcedArcPairs"] = [
            [
                {"a": p.aisle, "b": p.block, "o": p.offset},
                {"a": q.aisle, "b": q.block, "o": q.offset},
            ]
            for p, q in red.forced_pairs
        ]
        instance = red.instance
    if args.mode in ("spanner", "all"):
        graph = build_steiner_graph(instance)
        spanner = one_spanner(graph)
        kept = {(u, v) for u, v, _d in spanner.edges}
        removed = [
            [_vertex_ref(graph.vertices[u]), _vertex_ref(graph.vertices[v])]
            for u, v, _d in graph.edges
            if (u, v) not in kept
        ]
        doc["removedEdges"] = removed
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _cmd_solve(args) -> int:
    instance = _read_instance(args.infile)
    if args.algo == "dp":
        result = solve_dp(instance, max_cross_aisles=args.max_h,
                          max_table_bytes=args.max_table_bytes)
        print(f"cost {result.cost}")
        print("tour " + " ".join(str(v) for v in result.tour.vertices))
        if args.stats:
            stats = {
                "layers": result.stats.layers,
                "peakStates": result.stats.peak_states,
                "expansions": result.stats.expansions,
                "elapsedMs": result.stats.elapsed_ms,
            }
            Path(args.stats).write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    else:
        graph = build_steiner_graph(instance)
        result = held_karp(metric_closure(graph))
        print(f"cost {result.cost}")
        print("order " + " ".join(str(v) for v in result.visit_order))
    return EXIT_OK


def _cmd_export_milp(args) -> int:
    instance = _read_instance(args.infile)
    if args.formulation == "scfs":
        model = build_scfs(identity_reduction(instance))
    elif args.formulation == "scfs+":
        model = build_strengthened_scfs(instance)
    else:
        graph = build_steiner_graph(instance)
        model = build_scf(metric_closure(graph))
    _write(args.out, emit_lp(model))
    return EXIT_OK


def _cmd_validate(args) -> int:
    model = parse_lp(Path(args.model).read_text(encoding="utf-8"))
    from .backend import parse_solution_text

    assignment = parse_solution_text(Path(args.solution).read_text(encoding="utf-8"))
    result = feasibility_check(model, complete_pattern_variables(model, assignment))
    print(f"objective {result.objective}")
    if result.ok:
        print("feasible")
        return EXIT_OK
    for v in result.violations:
        print(f"violated {v}")
    return EXIT_VALIDATION


def _cmd_bench(args) -> int:
    from .bench import rows_to_csv, rows_to_table, run_bench

    classes = [parse_class(c) for c in args.classes.split(";") if c]
    seeds = _parse_seeds(args.seeds)
    algos = [a for a in args.algos.split(",") if a]
    rows = run_bench(classes, seeds, algos, max_h=args.max_h, threads=args.threads)
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_table(rows)
    _write(args.out, text)
    return EXIT_OK


def _parse_seeds(text: str) -> list[int]:
    seeds = []
    for part in text.split(","):
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    return seeds


def _cmd_render(args) -> int:
    instance = _read_instance(args.infile)
    tour = None
    cuts = None
    if args.tour:
        tour = solve_dp(instance, max_cross_aisles=args.max_h).subgraph
    if args.cuts:
        red = reduce_with_constraints(instance)
        cuts = enumerate_cuts(build_steiner_graph(red.instance))
        if args.tour:
            # Overlay the tour of the same (reduced) graph the cuts live on.
            from .preprocess import map_subgraph_to_reduced

            orig = build_steiner_graph(instance)
            tour = map_subgraph_to_reduced(
                orig, tour, build_steiner_graph(red.instance)
            )
            instance = red.instance
    _write(args.out, render_svg(instance, tour=tour, cuts=cuts))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="picktour",
        description="Exact picker-routing solvers and model builders.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a seeded benchmark instance")
    p.add_argument("--class", dest="cls", required=True,
                   help="class descriptor v,h,n,policy,depot")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--slots", type=int, default=None,
                   help="slots per sub-aisle (default 10; 45 for single-block classes)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("preprocess", help="reduce an instance")
    p.add_argument("--mode", choices=("constraints", "plain", "spanner", "all"),
                   required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_preprocess)

    p = sub.add_parser("solve", help="solve an instance exactly")
    p.add_argument("--algo", choices=("dp", "oracle"), default="dp")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--max-h", type=int, default=9)
    p.add_argument("--max-table-bytes", type=int, default=4 << 30)
    p.add_argument("--stats", default=None, help="write solver statistics JSON here")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("export-milp", help="emit an LP-format model file")
    p.add_argument("--formulation", choices=("scfs", "scfs+", "scf"), required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_export_milp)

    p = sub.add_parser("validate", help="check a solution file against a model")
    p.add_argument("--model", required=True)
    p.add_argument("--solution", required=True)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("bench", help="run the benchmark harness")
    p.add_argument("--classes", required=True,
                   help="semicolon-separated class descriptors")
    p.add_argument("--seeds", default="1-10", help="e.g. 1-10 or 1,5,7")
    p.add_argument("--algos", default="dp,oracle")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--max-h", type=int, default=9)
    p.add_argument("--format", choices=("csv", "table"), default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("render", help="render an instance (and tour/cuts) as SVG")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--tour", action="store_true")
    p.add_argument("--cuts", action="store_true")
    p.add_argument("--max-h", type=int, default=9)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ResourceCapExceeded, CapExceeded) as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE_CAP
    except (InstanceError, FormatError, TourValidationError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
