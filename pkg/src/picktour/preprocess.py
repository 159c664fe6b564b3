"""Instance reduction that leaves the optimal tour length unchanged.

Within a sub-aisle an optimal tour collects the products below its largest
empty gap in one go and the products above it in one go. The vertex
reductions exploit that: keep only the extreme products of each of the two
groups, either together with constraints forcing the kept pair to be
traversed (for constraint-capable solvers), or, without constraints, only
as long as the reduced sub-aisle's largest gap stays put. The edge
reduction computes a distance-preserving subgraph over the required
vertices.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import PickingInstance, ProductLocation
from .graph import SteinerGraph, shortest_path_counts, single_source_distances


@dataclass(frozen=True)
class SubAisleGaps:
    """Largest-gap structure of one sub-aisle.

    ``gap`` is the longest empty distance between two consecutive chain
    vertices (the two bounding intersections included); ties are broken by
    the lowest position, which fixes a deterministic split. ``below`` and
    ``above`` are the product offsets under and over the chosen gap,
    bottom to top. Either may be empty or a singleton.
    """

    aisle: int
    block: int
    gap: int
    gap_low: int  # offset of the vertex under the gap (0 = bottom intersection)
    gap_high: int  # offset of the vertex over the gap (length = top intersection)
    below: tuple[int, ...]
    above: tuple[int, ...]

    @property
    def kept_offsets(self) -> tuple[int, ...]:
        """Extremes of both groups, deduplicated, bottom to top."""
        keep: list[int] = []
        for group in (self.below, self.above):
            for o in {group[0], group[-1]} if group else ():
                keep.append(o)
        return tuple(sorted(set(keep)))


def _analyze_offsets(aisle: int, block: int, length: int, offsets: list[int]) -> SubAisleGaps:
    chain = [0] + offsets + [length]
    gap, lo, hi = -1, 0, length
    for a, b in zip(chain, chain[1:]):
        if b - a > gap:
            gap, lo, hi = b - a, a, b
    below = tuple(o for o in offsets if o <= lo)
    above = tuple(o for o in offsets if o >= hi)
    return SubAisleGaps(aisle, block, gap, lo, hi, below, above)


def analyze_gaps(instance: PickingInstance) -> dict[tuple[int, int], SubAisleGaps]:
    """Largest gap and below/above product groups for every sub-aisle."""
    lay = instance.layout
    offsets: dict[tuple[int, int], list[int]] = {}
    for p in instance.products:
        offsets.setdefault((p.aisle, p.block), []).append(p.offset)
    out = {}
    for a in range(lay.aisles):
        for b in range(lay.blocks):
            out[(a, b)] = _analyze_offsets(
                a, b, lay.sub_aisle_length, sorted(offsets.get((a, b), []))
            )
    return out


@dataclass(frozen=True)
class ReducedInstance:
    """A vertex-reduced instance plus the constraints that keep it exact.

    Each forced pair {p, q} means the tour must traverse the (p, q) arc in
    at least one direction; with the pairs enforced the optimal value of
    the reduced instance equals the original one. ``product_map`` sends an
    original product index (1-based, as in the required set) to its index
    in the reduced instance, or None if the product was removed.
    ``group_structure`` records, per sub-aisle, the kept offsets of the
    below/above groups; the pattern constraints of the flow model need it.
    """

    instance: PickingInstance
    forced_pairs: tuple[tuple[ProductLocation, ProductLocation], ...]
    product_map: dict[int, int | None]
    group_structure: dict[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]]


def identity_reduction(instance: PickingInstance) -> ReducedInstance:
    """Wrap an instance unreduced (no constraints, identity map)."""
    gaps = analyze_gaps(instance)
    structure = {key: (g.below, g.above) for key, g in gaps.items()}
    return ReducedInstance(
        instance,
        (),
        {k: k for k in range(1, instance.n + 1)},
        structure,
    )


def reduce_with_constraints(instance: PickingInstance) -> ReducedInstance:
    """Keep at most four products per sub-aisle, with traversal constraints.

    Per sub-aisle only the farthest-apart pair of each group survives; the
    removed interior products are spliced out (their chain arcs merge, so
    all path lengths are preserved). For every kept pair with two distinct
    members a forced traversal constraint is emitted.
    """
    gaps = analyze_gaps(instance)
    kept: dict[tuple[int, int], set[int]] = {
        key: set(g.kept_offsets) for key, g in gaps.items()
    }
    products: list[ProductLocation] = []
    product_map: dict[int, int | None] = {}
    for k, p in enumerate(instance.products, start=1):
        if p.offset in kept[(p.aisle, p.block)]:
            products.append(p)
            product_map[k] = len(products)
        else:
            product_map[k] = None
    pairs: list[tuple[ProductLocation, ProductLocation]] = []
    structure: dict[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]] = {}
    for key in sorted(gaps):
        g = gaps[key]
        a, b = key
        below = tuple(sorted({g.below[0], g.below[-1]})) if g.below else ()
        above = tuple(sorted({g.above[0], g.above[-1]})) if g.above else ()
        structure[key] = (below, above)
        for group in (below, above):
            if len(group) == 2:
                pairs.append(
                    (ProductLocation(a, b, group[0]), ProductLocation(a, b, group[1]))
                )
    reduced = instance.with_products(tuple(products))
    return ReducedInstance(reduced, tuple(pairs), product_map, structure)


def reduce_plain(instance: PickingInstance) -> PickingInstance:
    """Remove interior products without emitting constraints.

    A product may go only while the largest gap of the reduced sub-aisle
    stays strictly at its original place between the two groups: after a
    tentative removal the original gap must still be longer than every
    other gap (ties reject the removal; a tied gap elsewhere could let a
    solver split the sub-aisle at the wrong place). Candidates are scanned
    bottom to top, re-validating after each removal.
    """
    lay = instance.layout
    gaps = analyze_gaps(instance)
    removed: set[ProductLocation] = set()
    offsets_by_subaisle: dict[tuple[int, int], list[int]] = {}
    for p in instance.products:
        offsets_by_subaisle.setdefault((p.aisle, p.block), []).append(p.offset)
    for key in sorted(offsets_by_subaisle):
        g = gaps[key]
        current = sorted(offsets_by_subaisle[key])
        protected = set(g.kept_offsets)
        for o in sorted(current):
            if o in protected:
                continue
            trial = [x for x in current if x != o]
            chain = [0] + trial + [lay.sub_aisle_length]
            original = g.gap_high - g.gap_low
            ok = True
            for lo, hi in zip(chain, chain[1:]):
                if (lo, hi) == (g.gap_low, g.gap_high):
                    continue
                if hi - lo >= original:
                    ok = False
                    break
            if ok:
                current = trial
                removed.add(ProductLocation(key[0], key[1], o))
    products = tuple(p for p in instance.products if p not in removed)
    return instance.with_products(products)


def one_spanner(
    graph: SteinerGraph,
    required: list[int] | None = None,
    protected_edges: set[tuple[int, int]] | None = None,
) -> SteinerGraph:
    """Distance-preserving edge reduction over the required vertices.

    Greedy deletion in decreasing length order: an edge goes if every
    required pair keeps a shortest path avoiding it, decided exactly with
    shortest-path counts (a pair blocks the deletion when all of its
    shortest paths run through the edge). The output keeps every vertex
    and every required-pair distance of the input. ``protected_edges``
    (as ordered (u, v) pairs) are never deleted; forced traversal pairs
    must stay in the graph when both reductions compose.
    """
    req = list(graph.required) if required is None else list(required)
    protected = protected_edges or set()
    current = graph

    def tables(g: SteinerGraph):
        dist = {}
        cnt = {}
        for r in req:
            dist[r], cnt[r] = shortest_path_counts(g, r)
        return dist, cnt

    dist, cnt = tables(current)
    order = sorted(current.edges, key=lambda e: (-e[2], e[0], e[1]))
    removed: set[tuple[int, int]] = set()
    for u, v, d in order:
        if (u, v) in protected:
            continue
        blocked = False
        for i in req:
            if blocked:
                break
            di, ci = dist[i], cnt[i]
            for j in req:
                if j == i:
                    continue
                dj, cj = dist[j], cnt[j]
                through = 0
                if di[u] + d + dj[v] == di[j]:
                    through += ci[u] * cj[v]
                if di[v] + d + dj[u] == di[j]:
                    through += ci[v] * cj[u]
                if through and through == ci[j]:
                    blocked = True
                    break
        if not blocked:
            removed.add((u, v))
            current = current.without_edges({(u, v)})
            dist, cnt = tables(current)
    if hasattr(graph, "layout"):
        current.layout = graph.layout  # type: ignore[attr-defined]
        current.position_id = graph.position_id  # type: ignore[attr-defined]
        current.products_by_subaisle = graph.products_by_subaisle  # type: ignore[attr-defined]
    return current


def map_subgraph_to_reduced(original_graph, subgraph, reduced_graph):
    """Transfer a tour subgraph onto the reduced instance's graph.

    Every reduced edge corresponds to a run of original chain edges whose
    interior vertices were spliced out; a canonical optimal solution uses
    one multiplicity along each run (it traverses whole kept spans), which
    becomes the reduced edge's multiplicity.
    """
    from .graph import TourSubgraph

    def key_of(vertex):
        if vertex.kind == "product":
            return ("p", vertex.aisle, vertex.block, vertex.offset)
        return ("i", vertex.aisle, vertex.cross_aisle)

    orig_by_key = {key_of(v): v.id for v in original_graph.vertices}

    mult = subgraph.multiplicity
    red_mult: dict[tuple[int, int], int] = {}
    for u, v, _d in reduced_graph.edges:
        vu, vv = reduced_graph.vertices[u], reduced_graph.vertices[v]
        ou, ov = orig_by_key[key_of(vu)], orig_by_key[key_of(vv)]
        if vu.aisle != vv.aisle:
            # Cross-aisle edge: maps one to one.
            key = (ou, ov) if ou < ov else (ov, ou)
            m = mult.get(key, 0)
        else:
            # Sub-aisle run: walk the original chain between the endpoints.
            a = vu.aisle
            lo, hi = sorted((ou, ov), key=lambda i: original_graph.vertices[i].y)
            chain = [i for i in range(len(original_graph.vertices))
                     if original_graph.vertices[i].aisle == a
                     and original_graph.vertices[lo].y
                     <= original_graph.vertices[i].y
                     <= original_graph.vertices[hi].y
                     and (original_graph.vertices[i].kind == "product"
                          or original_graph.vertices[i].id in (lo, hi))]
            chain.sort(key=lambda i: original_graph.vertices[i].y)
            ms = set()
            for x, y in zip(chain, chain[1:]):
                key = (x, y) if x < y else (y, x)
                ms.add(mult.get(key, 0))
            if len(ms) != 1:
                raise ValueError(
                    "subgraph is not expressible on the reduced instance "
                    f"(mixed multiplicities {sorted(ms)} along a spliced run)"
                )
            m = ms.pop()
        if m:
            key = (u, v) if u < v else (v, u)
            red_mult[key] = m
    return TourSubgraph(red_mult)


def distances_over_required(graph: SteinerGraph) -> dict[tuple[int, int], int]:
    """Required-pair distance map, for spanner verification."""
    out = {}
    for i in graph.required:
        dist = single_source_distances(graph, i)
        for j in graph.required:
            out[(i, j)] = dist[j]
    return out
