"""Benchmark harness: seeded classes, per-row results, CSV and table output.

Each row is one (class, seed, algorithm) solve with arc counts before and
after preprocessing (vertex reduction plus the distance-preserving edge
reduction), solve time, state-space statistics and a validity flag.
Timing excludes a warm-up run and reports the median of three solves.
Failures are recorded per row; the run continues.
"""

from __future__ import annotations

import concurrent.futures
import statistics
import time
from dataclasses import dataclass

from .dp import ResourceCapExceeded, solve_dp
from .graph import build_steiner_graph, validate_tour_subgraph
from .instances import InstanceClass, generate
from .oracle import held_karp
from .preprocess import one_spanner, reduce_with_constraints

from . import metric_closure

BENCH_COLUMNS = (
    "class",
    "seed",
    "algo",
    "cost",
    "timeMs",
    "arcsBefore",
    "arcsAfter",
    "peakStates",
    "valid",
)


@dataclass
class BenchRow:
    cls: str
    seed: int
    algo: str
    cost: int | None
    time_ms: float | None
    arcs_before: int
    arcs_after: int
    peak_states: int | None
    valid: str

    def as_tuple(self) -> tuple:
        fmt = "" if self.time_ms is None else f"{self.time_ms:.2f}"
        return (
            self.cls,
            self.seed,
            self.algo,
            "" if self.cost is None else self.cost,
            fmt,
            self.arcs_before,
            self.arcs_after,
            "" if self.peak_states is None else self.peak_states,
            self.valid,
        )


def _solve_row(cls: InstanceClass, seed: int, algo: str, max_h: int, repeats: int) -> BenchRow:
    instance = generate(cls, seed)
    graph = build_steiner_graph(instance)
    arcs_before = 2 * len(graph.edges)
    reduced = reduce_with_constraints(instance)
    reduced_graph = one_spanner(build_steiner_graph(reduced.instance))
    arcs_after = 2 * len(reduced_graph.edges)

    def run_once():
        if algo == "dp":
            return solve_dp(instance, max_cross_aisles=max_h)
        if algo == "oracle":
            return held_karp(metric_closure(graph))
        raise ValueError(f"unknown algorithm {algo!r}")

    try:
        run_once()  # warm-up, excluded from timing
        times = []
        result = None
        for _ in range(repeats):
            t0 = time.perf_counter()
            result = run_once()
            times.append((time.perf_counter() - t0) * 1000)
        time_ms = statistics.median(times)
        if algo == "dp":
            valid = validate_tour_subgraph(graph, result.subgraph) == result.cost
            peak = result.stats.peak_states
        else:
            valid = result.visit_order is not None
            peak = None
        return BenchRow(
            cls.label, seed, algo, result.cost, time_ms, arcs_before, arcs_after,
            peak, "ok" if valid else "invalid",
        )
    except ResourceCapExceeded as exc:
        return BenchRow(
            cls.label, seed, algo, None, None, arcs_before, arcs_after,
            exc.stats.peak_states, f"cap:{exc.reason}",
        )
    except Exception as exc:  # per-row failure, run continues
        return BenchRow(
            cls.label, seed, algo, None, None, arcs_before, arcs_after,
            None, f"error:{type(exc).__name__}",
        )


def run_bench(
    classes: list[InstanceClass],
    seeds: list[int],
    algos: list[str],
    *,
    max_h: int = 9,
    threads: int = 1,
    repeats: int = 3,
) -> list[BenchRow]:
    jobs = [(cls, seed, algo) for cls in classes for seed in seeds for algo in algos]
    if threads <= 1:
        rows = [_solve_row(cls, seed, algo, max_h, repeats) for cls, seed, algo in jobs]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [
                pool.submit(_solve_row, cls, seed, algo, max_h, repeats)
                for cls, seed, algo in jobs
            ]
            rows = [f.result() for f in futures]
    rows.sort(key=lambda r: (r.cls, r.seed, r.algo))
    return rows


def rows_to_csv(rows: list[BenchRow]) -> str:
    lines = [",".join(BENCH_COLUMNS)]
    for r in rows:
        lines.append(",".join(str(x) for x in r.as_tuple()))
    return "\n".join(lines) + "\n"


def rows_to_table(rows: list[BenchRow]) -> str:
    data = [BENCH_COLUMNS] + [tuple(str(x) for x in r.as_tuple()) for r in rows]
    widths = [max(len(row[i]) for row in data) for i in range(len(BENCH_COLUMNS))]
    lines = []
    for idx, row in enumerate(data):
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if idx == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
