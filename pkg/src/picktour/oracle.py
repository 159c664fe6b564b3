"""Independent exact references for the picker-routing optimum.

Two deliberately different routes to the same number: a bitmask TSP
dynamic program over the metric closure (no structural assumption about
the warehouse at all), and an exhaustive search over edge multiplicity
assignments on tiny graphs. Because vertices and edges may be revisited,
the picking optimum equals the TSP optimum on shortest-path distances, so
the closure solver is a valid oracle for the full problem.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import (
    SteinerGraph,
    TourSubgraph,
    TourValidationError,
    validate_tour_subgraph,
)


class CapExceeded(RuntimeError):
    """Input is larger than the configured exhaustive-search cap."""


@dataclass(frozen=True)
class OracleResult:
    """Optimal cost plus the certificate the search produced."""

    cost: int
    visit_order: tuple[int, ...] | None = None
    subgraph: TourSubgraph | None = None


def held_karp(closure: list[list[int]], max_nodes: int = 16) -> OracleResult:
    """Exact TSP optimum over a distance matrix (depot is row 0).

    Classic subset dynamic program; exponential in the node count, hence
    the cap. Returns the optimal closed visit order.
    """
    m = len(closure)
    if m > max_nodes:
        raise CapExceeded(f"held_karp supports at most {max_nodes} nodes, got {m}")
    if m == 1:
        return OracleResult(0, (0, 0))
    n = m - 1  # cities 1..n, depot 0
    full = (1 << n) - 1
    inf = float("inf")
    # dp[mask][j]: best path depot -> ... -> city j+1 visiting exactly mask.
    dp = [[inf] * n for _ in range(full + 1)]
    parent = [[-1] * n for _ in range(full + 1)]
    for j in range(n):
        dp[1 << j][j] = closure[0][j + 1]
    for mask in range(1, full + 1):
        row = dp[mask]
        for j in range(n):
            cj = row[j]
            if cj == inf or not mask & (1 << j):
                continue
            dj = closure[j + 1]
            for k in range(n):
                if mask & (1 << k):
                    continue
                nmask = mask | (1 << k)
                cand = cj + dj[k + 1]
                if cand < dp[nmask][k]:
                    dp[nmask][k] = cand
                    parent[nmask][k] = j
    best = inf
    best_j = -1
    for j in range(n):
        cand = dp[full][j] + closure[j + 1][0]
        if cand < best:
            best = cand
            best_j = j
    order = [0]
    mask, j = full, best_j
    rev = []
    while j != -1:
        rev.append(j + 1)
        pj = parent[mask][j]
        mask ^= 1 << j
        j = pj
    order += list(reversed(rev)) + [0]
    return OracleResult(int(best), tuple(order))


def enumerate_tour_subgraphs(
    graph: SteinerGraph,
    max_edges: int = 14,
    forced_edges: list[tuple[int, int]] | None = None,
) -> OracleResult:
    """Minimum-cost edge multiplicity assignment in {0,1,2} that is a
    valid tour subgraph.

    Depth-first search over edges with two prunings that do not depend on
    the solver under test: a partial-cost bound against the best complete
    subgraph found so far, and parity/coverage checks on vertices whose
    incident edges are all decided. ``forced_edges`` restricts the search
    to assignments using each listed edge at least once.
    """
    edges = graph.edges
    if len(edges) > max_edges:
        raise CapExceeded(f"enumeration supports at most {max_edges} edges, got {len(edges)}")
    if graph.n == 0 and not forced_edges:
        return OracleResult(0, subgraph=TourSubgraph({}))

    forced = set()
    for u, v in forced_edges or ():
        forced.add((u, v) if u < v else (v, u))
        if not graph.has_edge(*sorted((u, v))):
            raise ValueError(f"forced edge {(u, v)} not in graph")

    nv = len(graph.vertices)
    incident: list[list[int]] = [[] for _ in range(nv)]
    for idx, (u, v, _d) in enumerate(edges):
        incident[u].append(idx)
        incident[v].append(idx)
    last_edge_of = [max(idxs) if idxs else -1 for idxs in incident]
    # Vertices that become fully decided after assigning edge idx.
    finishes: list[list[int]] = [[] for _ in range(len(edges))]
    for v in range(nv):
        if last_edge_of[v] >= 0:
            finishes[last_edge_of[v]].append(v)
    required = set(graph.required)

    # Any all-doubled assignment is valid if the graph is connected, which
    # warehouse graphs are; use it as the initial upper bound.
    best_cost = 2 * sum(d for _u, _v, d in edges) + 1
    best_assign: list[int] | None = None

    assign = [0] * len(edges)
    deg = [0] * nv

    def component_ok(k: int) -> bool:
        # Full validity via the public checker once all edges are set.
        mult = {
            (edges[i][0], edges[i][1]): assign[i] for i in range(len(edges)) if assign[i]
        }
        try:
            validate_tour_subgraph(graph, TourSubgraph(mult))
        except TourValidationError:
            return False
        return True

    def dfs(idx: int, cost: int) -> None:
        nonlocal best_cost, best_assign
        if cost >= best_cost:
            return
        if idx == len(edges):
            if component_ok(idx):
                best_cost = cost
                best_assign = assign.copy()
            return
        u, v, d = edges[idx]
        key = (u, v)
        for m in (0, 1, 2):
            if m == 0 and key in forced:
                continue
            assign[idx] = m
            deg[u] += m
            deg[v] += m
            ok = cost + m * d < best_cost
            if ok:
                for w in finishes[idx]:
                    if deg[w] % 2 == 1 or (deg[w] == 0 and w in required):
                        ok = False
                        break
            if ok:
                dfs(idx + 1, cost + m * d)
            deg[u] -= m
            deg[v] -= m
        assign[idx] = 0

    dfs(0, 0)
    if best_assign is None:
        raise TourValidationError("no valid tour subgraph exists under the given constraints")
    mult = {
        (edges[i][0], edges[i][1]): best_assign[i]
        for i in range(len(edges))
        if best_assign[i]
    }
    return OracleResult(best_cost, subgraph=TourSubgraph(mult))
