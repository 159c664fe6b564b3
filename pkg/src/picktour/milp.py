"""Single-commodity-flow models for the picking problem, with the
warehouse-specific strengthenings, plus exact feasibility checking.

The sparse model (SCFS) works on the Steiner graph: integer arc variables
x count traversals, continuous y route one unit of a commodity to every
product. Strengthenings: forced-arc constraints from the vertex
preprocessing, tightened flow big-Ms using the minimum number of required
vertices any route must visit first, four polynomially many cut families,
no-backtrack constraints at intersections, and logical patterns over the
(at most four) kept products of a sub-aisle.

The baseline model (SCF) is the classic single-commodity-flow TSP
formulation on the metric closure of the required vertices. A projection
maps its (fractional) solutions onto the sparse model by spreading each
closure arc over all shortest paths, preserving degree, conservation and
objective exactly.

No solver is embedded: models are value objects, emittable as LP-format
text, re-parseable, and checkable against assignments in exact rational
arithmetic.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction

from .graph import SteinerGraph, Tour, shortest_path_counts, single_source_distances
from .preprocess import ReducedInstance

Number = int | Fraction


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = "continuous"  # "continuous" | "integer" | "binary"
    lower: int = 0
    upper: int | None = None


@dataclass(frozen=True)
class Constraint:
    """A linear constraint: sum(coeffs) <sense> rhs."""

    name: str
    coeffs: tuple[tuple[str, int], ...]
    sense: str  # "<=" | ">=" | "="
    rhs: int


@dataclass
class MilpModel:
    """Objective, variables and constraints of one model instance."""

    name: str
    variables: dict[str, Variable] = field(default_factory=dict)
    objective: dict[str, int] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)
    context: object | None = field(default=None, repr=False, compare=False)

    def add_variable(self, var: Variable) -> None:
        if var.name in self.variables:
            raise ValueError(f"duplicate variable {var.name}")
        self.variables[var.name] = var

    def add_constraint(
        self, name: str, coeffs: list[tuple[str, int]], sense: str, rhs: int
    ) -> None:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"bad sense {sense!r}")
        for var, _c in coeffs:
            if var not in self.variables:
                raise ValueError(f"constraint {name} references unknown variable {var}")
        if any(name == c.name for c in self.constraints):
            raise ValueError(f"duplicate constraint name {name}")
        self.constraints.append(Constraint(name, tuple(coeffs), sense, rhs))

    def relaxed(self) -> "MilpModel":
        """Copy with all integrality requirements dropped (bounds remain)."""
        out = MilpModel(self.name + "_lp")
        for v in self.variables.values():
            out.variables[v.name] = Variable(v.name, "continuous", v.lower, v.upper)
        out.objective = dict(self.objective)
        out.constraints = list(self.constraints)
        out.context = self.context
        return out


@dataclass(frozen=True)
class ModelContext:
    """Graph and reduction a sparse model was built from."""

    graph: SteinerGraph
    reduced: ReducedInstance | None = None


def x_name(u: int, v: int) -> str:
    return f"x_{u}_{v}"


def y_name(u: int, v: int) -> str:
    return f"y_{u}_{v}"


def build_scfs(reduced: ReducedInstance | SteinerGraph) -> MilpModel:
    """Sparse single-commodity-flow model over the (reduced) Steiner graph.

    Per arc one integer x >= 0 and one continuous y >= 0. Every required
    vertex is left at least once; arrivals equal departures everywhere;
    the flow drops one unit at each product and is conserved at
    intersections; y can only ride on chosen arcs (big-M n).
    """
    if isinstance(reduced, SteinerGraph):
        graph = reduced
        red = None
    else:
        from .graph import build_steiner_graph

        graph = build_steiner_graph(reduced.instance)
        red = reduced
    n = graph.n
    model = MilpModel("scfs")
    model.context = ModelContext(graph, red)
    arcs = graph.arcs()
    for u, v, _d in arcs:
        model.add_variable(Variable(x_name(u, v), "integer"))
    for u, v, _d in arcs:
        model.add_variable(Variable(y_name(u, v), "continuous"))
    model.objective = {x_name(u, v): d for u, v, d in arcs}

    required = set(graph.required)
    depot = graph.depot
    for i in graph.required:
        model.add_constraint(
            f"visit_{i}",
            [(x_name(i, j), 1) for j, _d in graph.adj[i]],
            ">=",
            1,
        )
    for i in range(len(graph.vertices)):
        coeffs = [(x_name(i, j), 1) for j, _d in graph.adj[i]]
        coeffs += [(x_name(j, i), -1) for j, _d in graph.adj[i]]
        model.add_constraint(f"balance_{i}", coeffs, "=", 0)
    for i in range(len(graph.vertices)):
        if i == depot:
            continue
        coeffs = [(y_name(j, i), 1) for j, _d in graph.adj[i]]
        coeffs += [(y_name(i, j), -1) for j, _d in graph.adj[i]]
        model.add_constraint(
            f"flow_{i}", coeffs, "=", 1 if i in required else 0
        )
    for u, v, _d in arcs:
        model.add_constraint(
            f"link_{u}_{v}",
            [(y_name(u, v), 1), (x_name(u, v), -n)],
            "<=",
            0,
        )
    return model


def add_forced_arc_constraints(model: MilpModel, reduced: ReducedInstance) -> MilpModel:
    """One traversal constraint per forced product pair: x_pq + x_qp >= 1."""
    graph = model.context.graph
    by_loc = {}
    for k, p in enumerate(reduced.instance.products, start=1):
        by_loc[(p.aisle, p.block, p.offset)] = k
    for idx, (p, q) in enumerate(reduced.forced_pairs):
        u = by_loc[(p.aisle, p.block, p.offset)]
        v = by_loc[(q.aisle, q.block, q.offset)]
        if not graph.has_edge(u, v):
            raise ValueError(f"forced pair {(u, v)} is not an arc of the reduced graph")
        model.add_constraint(
            f"forced_{idx}",
            [(x_name(u, v), 1), (x_name(v, u), 1)],
            ">=",
            1,
        )
    return model


def min_required_before(graph: SteinerGraph) -> list[int]:
    """Per vertex, the minimum number of products any depot route must
    visit strictly before first reaching it (the depot itself counts
    nothing). Dijkstra with 0/1 weights on the tail vertex."""
    nv = len(graph.vertices)
    required = set(graph.required)
    depot = graph.depot
    weight = [1 if (v in required and v != depot) else 0 for v in range(nv)]
    inf = float("inf")
    dist = [inf] * nv
    dist[depot] = 0
    heap = [(0, depot)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        nd = d + weight[u]
        for v, _len in graph.adj[u]:
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return [int(d) for d in dist]


def strengthen_flow_bounds(model: MilpModel) -> MilpModel:
    """Replace each big-M link y_ij <= n x_ij by y_ij <= (n - n_R(i)) x_ij.

    Delivering at first visits, a picker crossing (i, j) has already
    dropped at least n_R(i) units, so the remaining flow is bounded by
    n - n_R(i).
    """
    graph = model.context.graph
    n = graph.n
    before = min_required_before(graph)
    replaced = []
    for c in model.constraints:
        if c.name.startswith("link_"):
            _tag, u, v = c.name.split("_")
            u = int(u)
            replaced.append(
                Constraint(
                    c.name,
                    ((y_name(u, int(v)), 1), (x_name(u, int(v)), -(n - before[u]))),
                    "<=",
                    0,
                )
            )
        else:
            replaced.append(c)
    model.constraints = replaced
    return model


@dataclass(frozen=True)
class Cut:
    """A vertex cut: the arcs leaving S, at least one of which must be used."""

    name: str
    kind: str
    arcs: tuple[tuple[int, int], ...]


def _chain(graph: SteinerGraph, aisle: int, block: int) -> list[int]:
    pos = graph.position_id  # type: ignore[attr-defined]
    chain = [pos[(aisle, block)]]
    chain += graph.products_by_subaisle.get((aisle, block), [])  # type: ignore[attr-defined]
    chain.append(pos[(aisle, block + 1)])
    return chain


def enumerate_cuts(graph: SteinerGraph) -> list[Cut]:
    """The four cut families; every emitted cut separates required vertices.

    Line cuts slice the warehouse between cross-aisles (both just above
    the lower and just below the upper row of each block) or between
    adjacent aisles. Corner boxes combine one horizontal and one vertical
    slice anchored at each of the four corners. Sub-aisle cuts isolate
    each run of two or more adjacent products. Cross cuts isolate the
    interval from the highest product of a block to the lowest product of
    the block above it across their shared intersection.
    """
    lay = graph.layout  # type: ignore[attr-defined]
    pos = graph.position_id  # type: ignore[attr-defined]
    v, h = lay.aisles, lay.cross_aisles
    req_vertices = [graph.vertices[i] for i in graph.required]

    def required_rows_blocks():
        rows = set()
        for vv in req_vertices:
            if vv.kind == "product":
                rows.add(("block", vv.block))
            else:
                rows.add(("row", vv.cross_aisle))
        return rows

    cuts: list[Cut] = []

    def req_below_hline(b: int, include_block: bool) -> bool:
        # Any required vertex strictly under the slice of block b?
        for vv in req_vertices:
            if vv.kind == "product":
                if vv.block < b or (include_block and vv.block == b):
                    return True
            elif vv.cross_aisle <= b:
                return True
        return False

    def req_above_hline(b: int, include_block: bool) -> bool:
        for vv in req_vertices:
            if vv.kind == "product":
                if vv.block > b or (not include_block and vv.block == b):
                    return True
            elif vv.cross_aisle >= b + 1:
                return True
        return False

    seen_arcsets = set()

    def emit(kind: str, arcs: list[tuple[int, int]]) -> None:
        # On a spanner-reduced graph some crossing arcs are gone; the
        # survivors still form a valid cut (connectivity over required
        # vertices guarantees at least one).
        arcs = [(u, v) for u, v in arcs if graph.has_edge(u, v)]
        key = tuple(sorted(arcs))
        if not arcs or key in seen_arcsets:
            return
        seen_arcsets.add(key)
        cuts.append(Cut(f"cut_{kind}_{len(cuts)}", kind, tuple(sorted(arcs))))

    # Horizontal line cuts: slice block b just above its lower row
    # (products of b stay above) or just below its upper row.
    for b in range(h - 1):
        for products_below in (False, True):
            if not req_below_hline(b, products_below):
                continue
            if not req_above_hline(b, products_below):
                continue
            arcs = []
            for a in range(v):
                chain = _chain(graph, a, b)
                if products_below:
                    arcs.append((chain[-2], chain[-1]))
                else:
                    arcs.append((chain[0], chain[1]))
            emit("hline", arcs)

    # Vertical line cuts between adjacent aisles.
    def req_left(a: int) -> bool:
        return any(vv.aisle <= a for vv in req_vertices)

    def req_right(a: int) -> bool:
        return any(vv.aisle > a for vv in req_vertices)

    for a in range(v - 1):
        if not (req_left(a) and req_right(a)):
            continue
        arcs = [(pos[(a, r)], pos[(a + 1, r)]) for r in range(h)]
        emit("vline", arcs)

    # Corner boxes: k rows by m aisles anchored at each corner.
    def box_cut(rows: range, cols: range, top_block: int, top_from_below: bool,
                side_col: int, side_dir: int) -> None:
        inside_rows = set(rows)
        inside_cols = set(cols)

        def inside(vv) -> bool:
            if vv.aisle not in inside_cols:
                return False
            if vv.kind == "product":
                return (vv.block in inside_rows) and (vv.block + 1 in inside_rows or not top_from_below)
            return vv.cross_aisle in inside_rows

        # Products of the sliced block belong outside the box.
        def inside_strict(vv) -> bool:
            if vv.aisle not in inside_cols:
                return False
            if vv.kind == "product":
                return vv.block in inside_rows and vv.block + 1 in inside_rows
            return vv.cross_aisle in inside_rows

        has_in = any(inside_strict(vv) for vv in req_vertices)
        has_out = any(not inside_strict(vv) for vv in req_vertices)
        if not (has_in and has_out):
            return
        arcs = []
        for a in cols:
            chain = _chain(graph, a, top_block)
            if top_from_below:
                arcs.append((chain[0], chain[1]))
            else:
                arcs.append((chain[-1], chain[-2]))
        for r in rows:
            arcs.append((pos[(side_col, r)], pos[(side_col + side_dir, r)]))
        emit("box", arcs)

    for k in range(1, h - 1 + 1):
        for m in range(1, v - 1 + 1):
            if k == h or m == v:
                continue
            # bottom-left / bottom-right: rows 0..k-1, slice block k-1 from below
            box_cut(range(k), range(m), k - 1, True, m - 1, +1)
            box_cut(range(k), range(v - m, v), k - 1, True, v - m, -1)
            # top-left / top-right: rows h-k..h-1, slice block h-k-1 from above
            box_cut(range(h - k, h), range(m), h - k - 1, False, m - 1, +1)
            box_cut(range(h - k, h), range(v - m, v), h - k - 1, False, v - m, -1)

    # Sub-aisle runs of two or more adjacent products.
    for a in range(v):
        for b in range(h - 1):
            chain = _chain(graph, a, b)
            prods = chain[1:-1]
            for i in range(len(prods)):
                for j in range(i + 1, len(prods)):
                    lo, hi = i + 1, j + 1  # indices in chain
                    arcs = [(chain[lo], chain[lo - 1]), (chain[hi], chain[hi + 1])]
                    emit("subaisle", arcs)

    # Cross cuts: highest product of a block to the lowest of the block
    # above, through the shared intersection.
    for a in range(v):
        for b in range(h - 2):
            lower = _chain(graph, a, b)
            upper = _chain(graph, a, b + 1)
            if len(lower) < 3 or len(upper) < 3:
                continue
            q = lower[-2]  # highest product below
            mid = lower[-1]
            p = upper[1]  # lowest product above
            arcs = [(q, lower[-3]), (p, upper[2])]
            mid_a = graph.vertices[mid].aisle
            row = graph.vertices[mid].cross_aisle
            if mid_a > 0:
                arcs.append((mid, pos[(mid_a - 1, row)]))
            if mid_a < v - 1:
                arcs.append((mid, pos[(mid_a + 1, row)]))
            emit("cross", arcs)

    return cuts


def add_cut_inequalities(model: MilpModel) -> MilpModel:
    """Add x(S : S-bar) >= 1 for every enumerated cut (one direction is
    enough: degree balance implies the reverse)."""
    graph = model.context.graph
    for cut in enumerate_cuts(graph):
        model.add_constraint(
            cut.name, [(x_name(u, v), 1) for u, v in cut.arcs], ">=", 1
        )
    return model


def add_intersection_connexity(model: MilpModel) -> MilpModel:
    """No immediate backtrack at intersections: an arc out of a Steiner
    vertex needs an arc in from another side, and vice versa."""
    graph = model.context.graph
    for i, vert in enumerate(graph.vertices):
        if vert.required:
            continue
        neigh = [j for j, _d in graph.adj[i]]
        for j in neigh:
            others = [k for k in neigh if k != j]
            model.add_constraint(
                f"noback_out_{i}_{j}",
                [(x_name(i, j), 1)] + [(x_name(k, i), -1) for k in others],
                "<=",
                0,
            )
            model.add_constraint(
                f"noback_in_{i}_{j}",
                [(x_name(j, i), 1)] + [(x_name(i, k), -1) for k in others],
                "<=",
                0,
            )
    return model


def add_pattern_constraints(model: MilpModel) -> MilpModel:
    """Logical implications over a reduced sub-aisle's kept products.

    With the kept products labeled a, b (below-group extremes) and c, d
    (above-group extremes) between the bottom intersection t and the top
    intersection s, the six traversal ways imply: sd=>dc, ds=>cd, ta=>ab,
    at=>dc, cb=>dc and ba, bc=>ab and cd. Implications whose labels are
    missing (smaller groups) or whose arcs do not exist are dropped. A
    conjunction P => Q and R is linearized with an auxiliary binary z via
    z >= Q + R - 1, z <= Q, z <= R, P <= z.
    """
    ctx = model.context
    graph = ctx.graph
    reduced = ctx.reduced
    if reduced is None:
        raise ValueError("pattern constraints need a reduced-instance context")
    by_loc = {}
    for k, p in enumerate(reduced.instance.products, start=1):
        by_loc[(p.aisle, p.block, p.offset)] = k
    pos = graph.position_id  # type: ignore[attr-defined]
    aux = 0
    pat = 0

    def arc_ok(u, v):
        return u is not None and v is not None and u != v and graph.has_edge(u, v)

    def implies(p_arc, q_arc):
        nonlocal pat
        if not (arc_ok(*p_arc) and arc_ok(*q_arc)):
            return
        model.add_constraint(
            f"pattern_{pat}",
            [(x_name(*p_arc), 1), (x_name(*q_arc), -1)],
            "<=",
            0,
        )
        pat += 1

    def implies_both(p_arc, q_arc, r_arc):
        nonlocal aux, pat
        ok_q, ok_r = arc_ok(*q_arc), arc_ok(*r_arc)
        if not arc_ok(*p_arc) or not (ok_q or ok_r):
            return
        if not (ok_q and ok_r):
            implies(p_arc, q_arc if ok_q else r_arc)
            return
        z = f"z_{aux}"
        aux += 1
        model.add_variable(Variable(z, "binary", 0, 1))
        q, r, p = x_name(*q_arc), x_name(*r_arc), x_name(*p_arc)
        model.add_constraint(f"pattern_{pat}_lb", [(z, 1), (q, -1), (r, -1)], ">=", -1)
        model.add_constraint(f"pattern_{pat}_q", [(z, 1), (q, -1)], "<=", 0)
        model.add_constraint(f"pattern_{pat}_r", [(z, 1), (r, -1)], "<=", 0)
        model.add_constraint(f"pattern_{pat}_p", [(p, 1), (z, -1)], "<=", 0)
        pat += 1

    for (aisle, block) in sorted(reduced.group_structure):
        below, above = reduced.group_structure[(aisle, block)]
        t = pos[(aisle, block)]
        s = pos[(aisle, block + 1)]

        def pid(off):
            return by_loc.get((aisle, block, off))

        a = pid(below[0]) if below else None
        b = pid(below[-1]) if below else None
        c = pid(above[0]) if above else None
        d = pid(above[-1]) if above else None
        implies((s, d), (d, c))
        implies((d, s), (c, d))
        implies((t, a), (a, b))
        implies((a, t), (d, c))
        implies_both((c, b), (d, c), (b, a))
        implies_both((b, c), (a, b), (c, d))
    return model


def complete_pattern_variables(
    model: MilpModel, assignment: dict[str, Number]
) -> dict[str, Number]:
    """Fill in the pattern gadgets' auxiliary binaries.

    Each gadget's z must equal the conjunction of its two arc indicators;
    the defining constraints (named pattern_k_q / pattern_k_r) identify
    the arcs, so the completion works on parsed models too.
    """
    out = dict(assignment)
    pairs: dict[str, dict[str, str]] = {}
    for c in model.constraints:
        if c.name.startswith("pattern_") and c.name.endswith(("_q", "_r")):
            z = next(n for n, co in c.coeffs if co > 0)
            other = next(n for n, co in c.coeffs if co < 0)
            pairs.setdefault(z, {})[c.name[-1]] = other
    for z, qr in pairs.items():
        if z in out:
            continue
        q = Fraction(str(out.get(qr["q"], 0)))
        r = Fraction(str(out.get(qr["r"], 0)))
        out[z] = 1 if (q >= 1 and r >= 1) else 0
    return out


def build_strengthened_scfs(instance) -> MilpModel:
    """Full pipeline: vertex reduction, forced-arc-protected edge
    reduction, sparse flow model, and every strengthening."""
    from .graph import build_steiner_graph
    from .preprocess import one_spanner, reduce_with_constraints

    red = reduce_with_constraints(instance)
    graph = build_steiner_graph(red.instance)
    by_loc = {}
    for k, p in enumerate(red.instance.products, start=1):
        by_loc[(p.aisle, p.block, p.offset)] = k
    protected = set()
    for p, q in red.forced_pairs:
        u = by_loc[(p.aisle, p.block, p.offset)]
        v = by_loc[(q.aisle, q.block, q.offset)]
        protected.add((u, v) if u < v else (v, u))
    graph = one_spanner(graph, protected_edges=protected)
    model = build_scfs(graph)
    model.context = ModelContext(graph, red)
    add_forced_arc_constraints(model, red)
    strengthen_flow_bounds(model)
    add_cut_inequalities(model)
    add_intersection_connexity(model)
    add_pattern_constraints(model)
    return model


def build_scf(closure: list[list[int]]) -> MilpModel:
    """Classic single-commodity-flow TSP model on the metric closure.

    Binary arc variables with in/out degree exactly one per vertex, one
    flow unit delivered everywhere but the depot, and big-M links.
    """
    m = len(closure)
    n = m - 1
    model = MilpModel("scf")
    for i in range(m):
        for j in range(m):
            if i != j:
                model.add_variable(Variable(x_name(i, j), "binary", 0, 1))
    for i in range(m):
        for j in range(m):
            if i != j:
                model.add_variable(Variable(y_name(i, j), "continuous"))
    model.objective = {
        x_name(i, j): closure[i][j] for i in range(m) for j in range(m) if i != j
    }
    for i in range(m):
        model.add_constraint(
            f"out_{i}", [(x_name(i, j), 1) for j in range(m) if j != i], "=", 1
        )
        model.add_constraint(
            f"in_{i}", [(x_name(j, i), 1) for j in range(m) if j != i], "=", 1
        )
    for i in range(1, m):
        coeffs = [(y_name(j, i), 1) for j in range(m) if j != i]
        coeffs += [(y_name(i, j), -1) for j in range(m) if j != i]
        model.add_constraint(f"flow_{i}", coeffs, "=", 1)
    for i in range(m):
        for j in range(m):
            if i != j:
                model.add_constraint(
                    f"link_{i}_{j}",
                    [(y_name(i, j), 1), (x_name(i, j), -n)],
                    "<=",
                    0,
                )
    return model


def project_solution(
    xprime: dict[tuple[int, int], Number], graph: SteinerGraph
) -> dict[tuple[int, int], Fraction]:
    """Project closure-arc values onto Steiner-graph arcs.

    Each closure arc (i, j) spreads its value uniformly over all shortest
    i-j paths; an arc's share is (paths i->u) * (paths v->j) / (paths
    i->j) whenever (u, v) lies on a shortest path. Exact fractions keep
    the three projection properties (degree, conservation, objective)
    checkable with equality.
    """
    req = graph.required
    dist: dict[int, list[int]] = {}
    cnt: dict[int, list[int]] = {}
    for r in req:
        dist[r], cnt[r] = shortest_path_counts(graph, r)
    out: dict[tuple[int, int], Fraction] = {}
    for (ri, rj), val in xprime.items():
        if val == 0:
            continue
        i, j = req[ri], req[rj]
        di, ci = dist[i], cnt[i]
        dj, cj = dist[j], cnt[j]
        total = ci[j]
        share = Fraction(val) / total
        for u, v, d in graph.arcs():
            if di[u] + d + dj[v] == di[j]:
                through = ci[u] * cj[v]
                if through:
                    out[(u, v)] = out.get((u, v), Fraction(0)) + share * through
    return out


# ---------------------------------------------------------------------------
# LP text emission / parsing / checking
# ---------------------------------------------------------------------------

def emit_lp(model: MilpModel) -> str:
    """Deterministic LP-format text (byte-identical for identical models)."""
    lines = [f"\\ {model.name}", "Minimize"]
    lines.append(" obj:" + _expr_text(sorted(model.objective.items())))
    lines.append("Subject To")
    for c in model.constraints:
        lines.append(f" {c.name}:" + _expr_text(c.coeffs) + f" {c.sense} {c.rhs}")
    lines.append("Bounds")
    for v in model.variables.values():
        if v.upper is not None and v.kind != "binary":
            lines.append(f" {v.name} <= {v.upper}")
    generals = [v.name for v in model.variables.values() if v.kind == "integer"]
    binaries = [v.name for v in model.variables.values() if v.kind == "binary"]
    if generals:
        lines.append("Generals")
        lines.append(" " + " ".join(generals))
    if binaries:
        lines.append("Binaries")
        lines.append(" " + " ".join(binaries))
    lines.append("End")
    return "\n".join(lines) + "\n"


def _expr_text(coeffs) -> str:
    if not coeffs:
        return " 0 __zero"
    parts = []
    for idx, (name, c) in enumerate(coeffs):
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else f"{mag} "
        if idx == 0 and sign == "+":
            parts.append(f" {coef}{name}")
        else:
            parts.append(f" {sign} {coef}{name}")
    return "".join(parts)


def parse_lp(text: str) -> MilpModel:
    """Parse LP text produced by emit_lp back into an equivalent model."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("\\")]
    name = "parsed"
    section = None
    model = MilpModel(name)
    obj: dict[str, int] = {}
    raw_constraints: list[tuple[str, list[tuple[str, int]], str, int]] = []
    bounds: list[tuple[str, str, int]] = []
    generals: list[str] = []
    binaries: list[str] = []
    headers = {"minimize", "subject to", "bounds", "generals", "binaries", "end"}
    for ln in lines:
        low = ln.strip().lower()
        if low in headers:
            section = low
            continue
        body = ln.strip()
        if section == "minimize":
            label, expr = body.split(":", 1)
            obj.update(_parse_expr(expr))
        elif section == "subject to":
            label, rest = body.split(":", 1)
            tokens = rest.split()
            for si, tok in enumerate(tokens):
                if tok in ("<=", ">=", "="):
                    sense = tok
                    expr = " ".join(tokens[:si])
                    rhs = int(tokens[si + 1])
                    break
            else:
                raise ValueError(f"constraint without sense: {ln}")
            raw_constraints.append((label.strip(), list(_parse_expr(expr).items()), sense, rhs))
        elif section == "bounds":
            tokens = body.split()
            bounds.append((tokens[0], tokens[1], int(tokens[2])))
        elif section == "generals":
            generals.extend(body.split())
        elif section == "binaries":
            binaries.extend(body.split())
    names: list[str] = []
    seen = set()
    for src in ([n for n in obj], [n for (_l, cs, _s, _r) in raw_constraints for n, _c in cs],
                [b[0] for b in bounds], generals, binaries):
        for n in src:
            if n != "__zero" and n not in seen:
                seen.add(n)
                names.append(n)
    gen, binset = set(generals), set(binaries)
    uppers = {n: u for n, _s, u in bounds}
    for n in names:
        kind = "integer" if n in gen else ("binary" if n in binset else "continuous")
        upper = 1 if kind == "binary" else uppers.get(n)
        model.variables[n] = Variable(n, kind, 0, upper)
    model.objective = {n: c for n, c in obj.items() if n != "__zero"}
    for label, coeffs, sense, rhs in raw_constraints:
        coeffs = [(n, c) for n, c in coeffs if n != "__zero"]
        model.constraints.append(Constraint(label, tuple(coeffs), sense, rhs))
    return model


def _parse_expr(expr: str) -> dict[str, int]:
    tokens = expr.replace("+", " + ").replace("-", " - ").split()
    out: dict[str, int] = {}
    sign = 1
    coef: int | None = None
    for tok in tokens:
        if tok == "+":
            sign, coef = 1, None
        elif tok == "-":
            sign, coef = -1, None
        else:
            try:
                coef = int(tok)
                continue
            except ValueError:
                pass
            c = sign * (coef if coef is not None else 1)
            out[tok] = out.get(tok, 0) + c
            sign, coef = 1, None
    return out


@dataclass
class CheckResult:
    ok: bool
    violations: list[str]
    objective: Fraction


def feasibility_check(
    model: MilpModel, assignment: dict[str, Number | str | float]
) -> CheckResult:
    """Evaluate bounds, integrality and every constraint exactly.

    Missing variables count as zero; values may be ints, Fractions,
    floats or strings ("0.5", "1/2"), all converted to exact rationals.
    """
    values: dict[str, Fraction] = {}
    for k, raw in assignment.items():
        values[k] = Fraction(str(raw)) if isinstance(raw, (str, float)) else Fraction(raw)
    violations: list[str] = []
    for v in model.variables.values():
        val = values.get(v.name, Fraction(0))
        if val < v.lower:
            violations.append(f"bound:{v.name} value {val} below {v.lower}")
        if v.upper is not None and val > v.upper:
            violations.append(f"bound:{v.name} value {val} above {v.upper}")
        if v.kind in ("integer", "binary") and val.denominator != 1:
            violations.append(f"integrality:{v.name} value {val} is fractional")
    for c in model.constraints:
        lhs = sum((values.get(n, Fraction(0)) * co for n, co in c.coeffs), Fraction(0))
        ok = lhs <= c.rhs if c.sense == "<=" else lhs >= c.rhs if c.sense == ">=" else lhs == c.rhs
        if not ok:
            violations.append(f"{c.name}: {lhs} {c.sense} {c.rhs} fails")
    objective = sum(
        (values.get(n, Fraction(0)) * co for n, co in model.objective.items()),
        Fraction(0),
    )
    return CheckResult(not violations, violations, objective)


def tour_assignment(graph: SteinerGraph, tour: Tour) -> dict[str, int]:
    """Directed x/y assignment of a closed walk for the sparse model.

    The walk must use each directed arc at most once (walks produced by
    the solver's orientation step do). x marks the arcs; y carries, per
    arc, the units still undelivered after the tail's visit, delivering
    each product's unit at its first visit.
    """
    n = graph.n
    required = set(graph.required)
    depot = graph.depot
    seen: set[int] = set()
    carried = n
    values: dict[str, int] = {}
    verts = tour.vertices
    if verts[0] != depot or verts[-1] != depot:
        raise ValueError("walk must start and end at the depot")
    for idx in range(len(verts) - 1):
        u, v = verts[idx], verts[idx + 1]
        if u in required and u != depot and u not in seen:
            seen.add(u)
            carried -= 1
        xn = x_name(u, v)
        if xn in values:
            raise ValueError(f"walk uses arc {(u, v)} twice")
        values[xn] = 1
        values[y_name(u, v)] = carried
    return values
