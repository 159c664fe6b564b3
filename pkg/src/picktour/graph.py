"""Sparse Steiner graph of a warehouse and exact shortest-path services.

Vertices are the aisle/cross-aisle intersections (Steiner: may be visited)
plus the depot and the products (required: must be visited). Arcs follow
four construction rules: horizontally adjacent intersections; the two end
intersections of an empty sub-aisle; an extreme product and its adjacent
intersection; two adjacent products of the same sub-aisle. The graph is
symmetric with integer arc lengths.

The depot occupies the intersection position of its (cross-aisle, aisle)
pair and is classified as required; it splits the cross-aisle there like
any intersection does.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .geometry import InstanceError, PickingInstance


@dataclass(frozen=True)
class Vertex:
    """A graph vertex with its warehouse position.

    ``y`` is the distance from cross-aisle 0 measured along the aisle;
    intersections carry their cross-aisle index, products their block and
    offset.
    """

    id: int
    kind: str  # "depot" | "product" | "intersection"
    aisle: int
    y: int
    cross_aisle: int | None = None
    block: int | None = None
    offset: int | None = None

    @property
    def required(self) -> bool:
        return self.kind != "intersection"


@dataclass
class SteinerGraph:
    """Symmetric weighted graph with required/Steiner vertex marking.

    ``required`` lists vertex ids in picking order: index 0 is the depot,
    index k is product k. ``edges`` holds each undirected edge once as
    (u, v, length) with u < v; ``adj`` mirrors them in both directions.
    """

    vertices: list[Vertex]
    edges: list[tuple[int, int, int]]
    required: list[int]
    adj: list[list[tuple[int, int]]] = field(init=False)
    _edge_length: dict[tuple[int, int], int] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        adj: list[list[tuple[int, int]]] = [[] for _ in self.vertices]
        lengths: dict[tuple[int, int], int] = {}
        for u, v, d in self.edges:
            if u == v:
                raise InstanceError("self-loop edges are not allowed")
            if d < 0:
                raise InstanceError("edge lengths must be non-negative integers")
            key = (u, v) if u < v else (v, u)
            if key in lengths:
                raise InstanceError(f"duplicate edge {key}")
            lengths[key] = d
            adj[u].append((v, d))
            adj[v].append((u, d))
        for lst in adj:
            lst.sort()
        self.adj = adj
        self._edge_length = lengths

    @property
    def depot(self) -> int:
        return self.required[0]

    @property
    def n(self) -> int:
        """Number of products (required vertices except the depot)."""
        return len(self.required) - 1

    def edge_length(self, u: int, v: int) -> int:
        return self._edge_length[(u, v) if u < v else (v, u)]

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_length

    def arcs(self) -> list[tuple[int, int, int]]:
        """All directed arcs (both orientations of every edge), sorted."""
        out = []
        for u, v, d in self.edges:
            out.append((u, v, d))
            out.append((v, u, d))
        out.sort()
        return out

    def without_edges(self, removed: set[tuple[int, int]]) -> "SteinerGraph":
        """Copy with the given (u, v) edges (u < v) removed."""
        kept = [(u, v, d) for u, v, d in self.edges if (u, v) not in removed]
        return SteinerGraph(self.vertices, kept, list(self.required))


def build_steiner_graph(instance: PickingInstance) -> SteinerGraph:
    """Build the sparse warehouse graph of a picking instance.

    Vertex ids: 0 is the depot, 1..n the products in instance order, then
    the intersections column-major. Within a non-empty sub-aisle the chain
    runs intersection, product, ..., product, intersection with lengths
    equal to the offset differences.
    """
    lay = instance.layout
    L, w = lay.sub_aisle_length, lay.aisle_pitch
    dep = instance.depot

    vertices: list[Vertex] = [
        Vertex(0, "depot", dep.aisle, dep.cross_aisle * L, cross_aisle=dep.cross_aisle)
    ]
    for k, p in enumerate(instance.products, start=1):
        vertices.append(
            Vertex(k, "product", p.aisle, p.block * L + p.offset, block=p.block, offset=p.offset)
        )

    # One vertex per grid position; the depot owns its own position.
    pos_id: dict[tuple[int, int], int] = {(dep.aisle, dep.cross_aisle): 0}
    for a in range(lay.aisles):
        for c in range(lay.cross_aisles):
            if (a, c) in pos_id:
                continue
            vid = len(vertices)
            vertices.append(Vertex(vid, "intersection", a, c * L, cross_aisle=c))
            pos_id[(a, c)] = vid

    products_by_subaisle: dict[tuple[int, int], list[int]] = {}
    for k, p in enumerate(instance.products, start=1):
        products_by_subaisle.setdefault((p.aisle, p.block), []).append(k)
    for ids in products_by_subaisle.values():
        ids.sort(key=lambda i: vertices[i].offset)

    edges: list[tuple[int, int, int]] = []

    def add_edge(u: int, v: int, d: int) -> None:
        edges.append((u, v, d) if u < v else (v, u, d))

    for a in range(lay.aisles):
        for b in range(lay.blocks):
            chain = [pos_id[(a, b)]]
            chain += products_by_subaisle.get((a, b), [])
            chain.append(pos_id[(a, b + 1)])
            ys = [vertices[i].y for i in chain]
            for i in range(len(chain) - 1):
                add_edge(chain[i], chain[i + 1], ys[i + 1] - ys[i])
    for c in range(lay.cross_aisles):
        for a in range(lay.aisles - 1):
            add_edge(pos_id[(a, c)], pos_id[(a + 1, c)], w)

    edges.sort()
    required = list(range(len(instance.products) + 1))
    graph = SteinerGraph(vertices, edges, required)
    graph.layout = lay  # type: ignore[attr-defined]
    graph.position_id = pos_id  # type: ignore[attr-defined]
    graph.products_by_subaisle = products_by_subaisle  # type: ignore[attr-defined]
    return graph


def single_source_distances(graph: SteinerGraph, src: int) -> list[int]:
    """Exact shortest-path distances from one vertex (Dijkstra)."""
    inf = float("inf")
    dist: list[int] = [inf] * len(graph.vertices)  # type: ignore[list-item]
    dist[src] = 0
    heap = [(0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, length in graph.adj[u]:
            nd = d + length
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def shortest_distance(graph: SteinerGraph, i: int, j: int) -> int:
    """d(i, j): length of a shortest path between two vertices."""
    if i == j:
        return 0
    return single_source_distances(graph, i)[j]


def metric_closure(graph: SteinerGraph) -> list[list[int]]:
    """Shortest-distance matrix restricted to the required vertices.

    Row/column order follows the required index order (depot first).
    """
    rows = []
    for r in graph.required:
        dist = single_source_distances(graph, r)
        rows.append([dist[s] for s in graph.required])
    return rows


def shortest_path_counts(graph: SteinerGraph, src: int) -> tuple[list[int], list[int]]:
    """Distances from ``src`` plus the number of shortest paths to each vertex."""
    dist = single_source_distances(graph, src)
    order = sorted(range(len(dist)), key=lambda v: dist[v])
    count = [0] * len(dist)
    count[src] = 1
    for v in order:
        if v == src:
            continue
        total = 0
        dv = dist[v]
        for u, length in graph.adj[v]:
            if dist[u] + length == dv:
                total += count[u]
        count[v] = total
    return dist, count


def enumerate_shortest_paths(
    graph: SteinerGraph, i: int, j: int, limit: int = 100_000
) -> list[tuple[int, ...]]:
    """All shortest i-j paths as vertex tuples (the complete set).

    An arc (u, v) lies on some shortest i-j path exactly when
    dist_i(u) + d(u, v) + dist_j(v) equals dist_i(j); the paths are the
    maximal chains of such arcs. ``limit`` guards against exponential
    blow-up on large symmetric grids.
    """
    if i == j:
        return [(i,)]
    dist_i = single_source_distances(graph, i)
    dist_j = single_source_distances(graph, j)
    target = dist_i[j]
    paths: list[tuple[int, ...]] = []
    stack: list[tuple[int, tuple[int, ...]]] = [(i, (i,))]
    while stack:
        u, prefix = stack.pop()
        if u == j:
            paths.append(prefix)
            if len(paths) > limit:
                raise ValueError(f"more than {limit} shortest paths between {i} and {j}")
            continue
        for v, length in graph.adj[u]:
            if dist_i[u] + length + dist_j[v] == target and dist_i[u] + length == dist_i[v]:
                stack.append((v, prefix + (v,)))
    paths.sort()
    return paths


class TourValidationError(ValueError):
    """A candidate tour subgraph violates a validity condition."""


class OddDegreeError(TourValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"vertex {vertex} has odd degree")
        self.vertex = vertex


class UncollectedRequiredError(TourValidationError):
    def __init__(self, vertex: int):
        super().__init__(f"required vertex {vertex} has zero degree")
        self.vertex = vertex


class DisconnectedError(TourValidationError):
    def __init__(self) -> None:
        super().__init__("tour subgraph has more than one connected component")


@dataclass(frozen=True)
class TourSubgraph:
    """Edge multiplicity map: each used edge appears once or twice.

    Keys are (u, v) with u < v. A valid tour subgraph has even degree
    everywhere, nonzero degree at every required vertex and a connected
    support, which makes it directable into a closed picking walk.
    """

    multiplicity: dict[tuple[int, int], int]

    def __post_init__(self) -> None:
        for (u, v), m in self.multiplicity.items():
            if m not in (1, 2):
                raise InstanceError(f"edge multiplicity must be 1 or 2, got {m} on {(u, v)}")
            if not u < v:
                raise InstanceError(f"edge keys must be ordered pairs, got {(u, v)}")

    def length(self, graph: SteinerGraph) -> int:
        return sum(m * graph.edge_length(u, v) for (u, v), m in self.multiplicity.items())

    def degrees(self, graph: SteinerGraph) -> list[int]:
        deg = [0] * len(graph.vertices)
        for (u, v), m in self.multiplicity.items():
            deg[u] += m
            deg[v] += m
        return deg


@dataclass(frozen=True)
class Tour:
    """Closed vertex walk starting and ending at the depot."""

    vertices: tuple[int, ...]
    length: int


def validate_tour_subgraph(graph: SteinerGraph, ts: TourSubgraph) -> int:
    """Check tour-subgraph validity and return the total length.

    Raises OddDegreeError, UncollectedRequiredError or DisconnectedError.
    The empty subgraph is valid exactly when the depot is the only
    required vertex (the trivial stay-at-depot tour).
    """
    mult = ts.multiplicity
    if not mult:
        if graph.n == 0:
            return 0
        raise UncollectedRequiredError(graph.required[1])
    deg = ts.degrees(graph)
    for v, d in enumerate(deg):
        if d % 2 == 1:
            raise OddDegreeError(v)
    for r in graph.required:
        if deg[r] == 0:
            raise UncollectedRequiredError(r)

    parent = list(range(len(graph.vertices)))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in mult:
        if not graph.has_edge(u, v):
            raise InstanceError(f"unknown edge {(u, v)}")
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    roots = {find(v) for v in range(len(deg)) if deg[v] > 0}
    if len(roots) > 1:
        raise DisconnectedError()
    return ts.length(graph)


def orient_subgraph(graph: SteinerGraph, ts: TourSubgraph) -> dict[tuple[int, int], int]:
    """Direct a valid tour subgraph into a balanced arc multiset.

    Doubled edges contribute one arc per direction. The single edges form
    an even-degree subgraph, which is decomposed into cycles, each
    oriented consistently; the result has in-degree equal to out-degree
    at every vertex and each directed arc used at most once.
    """
    arcs: dict[tuple[int, int], int] = {}
    single_adj: dict[int, list[int]] = {}
    for (u, v), m in sorted(ts.multiplicity.items()):
        if m == 2:
            arcs[(u, v)] = 1
            arcs[(v, u)] = 1
        else:
            single_adj.setdefault(u, []).append(v)
            single_adj.setdefault(v, []).append(u)
    for lst in single_adj.values():
        lst.sort(reverse=True)
    # Peel cycles off the single-edge subgraph; every vertex there has
    # even degree so the walk always closes.
    for start in sorted(single_adj):
        while single_adj.get(start):
            u = start
            while True:
                v = single_adj[u].pop()
                single_adj[v].remove(u)
                arcs[(u, v)] = arcs.get((u, v), 0) + 1
                u = v
                if u == start:
                    break
    return arcs


def euler_tour(graph: SteinerGraph, ts: TourSubgraph, start: int | None = None) -> Tour:
    """Directed Euler circuit of an oriented tour subgraph from the depot."""
    if not ts.multiplicity:
        s = graph.depot if start is None else start
        return Tour((s,), 0)
    arcs = orient_subgraph(graph, ts)
    out: dict[int, list[int]] = {}
    for (u, v), m in arcs.items():
        for _ in range(m):
            out.setdefault(u, []).append(v)
    for lst in out.values():
        lst.sort(reverse=True)
    s = graph.depot if start is None else start
    if s not in out:
        raise TourValidationError("start vertex has zero degree in the tour subgraph")
    # Iterative Hierholzer.
    stack = [s]
    walk: list[int] = []
    while stack:
        u = stack[-1]
        if out.get(u):
            stack.append(out[u].pop())
        else:
            walk.append(stack.pop())
    walk.reverse()
    length = sum(graph.edge_length(walk[i], walk[i + 1]) for i in range(len(walk) - 1))
    return Tour(tuple(walk), length)
