"""Exact dynamic program over separator states, any number of cross-aisles.

The grid of intersections is swept column by column: each aisle's vertical
sub-aisle edges bottom to top, then the horizontal cross-aisle edges to
the next column bottom to top. The frontier is one vertex per cross-aisle;
a state records, per frontier vertex, its degree parity (zero / even /
odd) and its connected component in the partial tour subgraph, encoded as
a canonical non-crossing partition (crossing components cannot occur on a
planar separator). The table value of a state is the cheapest partial
subgraph reaching it, so the sweep is a shortest path in a layered graph.

Transitions per vertical edge: skip the sub-aisle, traverse it once,
traverse it twice, enter from the top and return, enter from the bottom
and return, or collect both product groups with two returns split at the
largest product gap. Skipping is only allowed when the sub-aisle is empty;
every other kind collects all of its products. Horizontal edges carry
multiplicity 0, 1 or 2 and retire the left vertex from the frontier,
which is when its validity is checked: an odd degree is dead, the depot
must have been visited, and a component may vanish from the frontier only
if it is the finished tour (it contains the depot and nothing else is
open). After such a close only empty transitions remain legal.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache

from .geometry import PickingInstance, WarehouseLayout
from .graph import (
    SteinerGraph,
    Tour,
    TourSubgraph,
    build_steiner_graph,
    euler_tour,
    validate_tour_subgraph,
)

PARITY_ZERO, PARITY_EVEN, PARITY_ODD = 0, 1, 2

#: Frontier state: (parity per slot, canonical component index per slot).
State = tuple[tuple[int, ...], tuple[int, ...]]

#: Sentinel state after the tour subgraph closed; only empty transitions keep it alive.
DONE = "done"

VERTICAL_KINDS = ("none", "single", "double", "top_return", "bottom_return", "gap_split")
HORIZONTAL_KINDS = ("none", "single", "double")


@dataclass(frozen=True)
class Transition:
    """One decision for a grid edge: a traversal kind and its length cost."""

    kind: str
    axis: str  # "vertical" | "horizontal"
    length: int


@dataclass(frozen=True)
class GridEdge:
    """A grid edge in sweep order.

    Vertical edges are identified by (column, block); horizontal edges by
    (column, cross-aisle row) and link the column to the next one.
    """

    axis: str
    column: int
    row: int


def edge_order(layout: WarehouseLayout) -> list[GridEdge]:
    """Sweep order: per column its verticals bottom to top, then the
    horizontals to the next column bottom to top."""
    edges: list[GridEdge] = []
    for x in range(layout.aisles):
        for b in range(layout.blocks):
            edges.append(GridEdge("vertical", x, b))
        if x < layout.aisles - 1:
            for r in range(layout.cross_aisles):
                edges.append(GridEdge("horizontal", x, r))
    return edges


def vertical_transitions(length: int, offsets: list[int]) -> list[Transition]:
    """Applicable traversal kinds of one sub-aisle with their costs.

    ``offsets`` are the product positions from the lower intersection.
    Empty sub-aisles may be skipped; the return kinds need a product; the
    gap split needs two, and its cost uses the largest gap between two
    consecutive products (splits at any other product gap cost more and
    reach the same state).
    """
    offs = sorted(offsets)
    k = len(offs)
    out = []
    if k == 0:
        out.append(Transition("none", "vertical", 0))
    out.append(Transition("single", "vertical", length))
    out.append(Transition("double", "vertical", 2 * length))
    if k >= 1:
        out.append(Transition("top_return", "vertical", 2 * (length - offs[0])))
        out.append(Transition("bottom_return", "vertical", 2 * offs[-1]))
    if k >= 2:
        gap = max(b - a for a, b in zip(offs, offs[1:]))
        out.append(Transition("gap_split", "vertical", 2 * (length - gap)))
    return out


def horizontal_transitions(pitch: int) -> list[Transition]:
    return [
        Transition("none", "horizontal", 0),
        Transition("single", "horizontal", pitch),
        Transition("double", "horizontal", 2 * pitch),
    ]


def _noncrossing(comp: tuple[int, ...]) -> bool:
    """True when the component vector is a non-crossing partition.

    Scanning the slots, every component's occurrences must sit on top of
    the open-block stack; meeting a component that is open but buried
    means two components interleave.
    """
    last: dict[int, int] = {}
    for i, c in enumerate(comp):
        if c:
            last[c] = i
    stack: list[int] = []
    seen: set[int] = set()
    for i, c in enumerate(comp):
        if not c:
            continue
        if stack and stack[-1] == c:
            pass
        elif c in seen:
            return False
        else:
            seen.add(c)
            stack.append(c)
        if last[c] == i:
            stack.pop()
    return True


def _canonical(par: list[int], comp: list[int]) -> State | None:
    state = _renumber(par, comp)
    if not _noncrossing(state[1]):
        return None
    return state


def _renumber(par: list[int], comp: list[int]) -> State:
    """Canonical first-occurrence numbering, crossing not re-checked.

    The transitions cannot introduce a crossing: horizontal moves never
    merge two open components, new components start as singletons, and a
    vertical merge joins the components of two adjacent slots, which
    preserves non-crossing partitions.
    """
    remap: dict[int, int] = {}
    out = []
    nxt = 1
    for c in comp:
        if c == 0:
            out.append(0)
        else:
            m = remap.get(c)
            if m is None:
                remap[c] = m = nxt
                nxt += 1
            out.append(m)
    return (tuple(par), tuple(out))


def _toggle(p: int) -> int:
    return PARITY_EVEN if p == PARITY_ODD else PARITY_ODD


def _bump(p: int) -> int:
    return PARITY_EVEN if p == PARITY_ZERO else p


def _merge(comp: list[int], a: int, b: int) -> None:
    ca, cb = comp[a], comp[b]
    fresh = max(comp) + 1
    if ca == 0 and cb == 0:
        comp[a] = comp[b] = fresh
    elif ca == 0:
        comp[a] = cb
    elif cb == 0:
        comp[b] = ca
    elif ca != cb:
        for i, c in enumerate(comp):
            if c == cb:
                comp[i] = ca


def _apply_vertical(state, slot: int, kind: str):
    if state == DONE:
        return DONE if kind == "none" else None
    if kind == "none":
        return state
    par = list(state[0])
    comp = list(state[1])
    r, s = slot, slot + 1
    if kind == "single":
        par[r] = _toggle(par[r])
        par[s] = _toggle(par[s])
        _merge(comp, r, s)
    elif kind == "double":
        par[r] = _bump(par[r])
        par[s] = _bump(par[s])
        _merge(comp, r, s)
    elif kind == "top_return":
        par[s] = _bump(par[s])
        if comp[s]:
            return (tuple(par), state[1])
        comp[s] = max(comp) + 1
    elif kind == "bottom_return":
        par[r] = _bump(par[r])
        if comp[r]:
            return (tuple(par), state[1])
        comp[r] = max(comp) + 1
    elif kind == "gap_split":
        par[r] = _bump(par[r])
        par[s] = _bump(par[s])
        if comp[r] and comp[s]:
            return (tuple(par), state[1])
        if comp[r] == 0:
            comp[r] = max(comp) + 1
        if comp[s] == 0:
            comp[s] = max(comp) + 2
    else:
        raise ValueError(f"unknown vertical kind {kind!r}")
    return _renumber(par, comp)


def _apply_horizontal(state, slot: int, mult: int, depot_exit: bool, close_allowed: bool):
    if state == DONE:
        return DONE if mult == 0 and not depot_exit else None
    par = list(state[0])
    comp = list(state[1])
    u_par, u_comp = par[slot], comp[slot]
    exit_par = u_par if mult == 0 else (_toggle(u_par) if mult == 1 else _bump(u_par))
    if exit_par == PARITY_ODD:
        return None
    if exit_par == PARITY_ZERO:
        if depot_exit:
            return None
        par[slot], comp[slot] = PARITY_ZERO, 0
        return _canonical(par, comp)
    # exit_par is even: the retired vertex keeps a component.
    if mult == 0:
        par[slot], comp[slot] = PARITY_ZERO, 0
        if u_comp not in comp:
            # The component leaves the frontier: only the finished tour may.
            if close_allowed and not any(comp):
                return DONE
            return None
        return _canonical(par, comp)
    if mult == 1:
        # Exits even only from an odd vertex; the new vertex picks up one edge.
        par[slot] = PARITY_ODD
        return _canonical(par, comp)
    # mult == 2: the new vertex joins (or founds) the component.
    par[slot] = PARITY_EVEN
    if u_comp == 0:
        comp[slot] = max(comp) + 1
    return _canonical(par, comp)


def apply_transition(
    state,
    tr: Transition,
    slot: int,
    *,
    depot_exit: bool = False,
    close_allowed: bool = True,
):
    """Extend a state by one transition; None when the result is invalid.

    For vertical transitions ``slot`` is the lower of the two frontier
    vertices the sub-aisle touches; for horizontal ones it is the vertex
    retired from the frontier. ``depot_exit`` marks the depot's own
    horizontal edge; ``close_allowed`` is true once the depot has left the
    frontier, the only time a component may finish.
    """
    if tr.axis == "vertical":
        return _apply_vertical(state, slot, tr.kind)
    mult = HORIZONTAL_KINDS.index(tr.kind)
    return _apply_horizontal(state, slot, mult, depot_exit, close_allowed)


def check_state(state, *, final: bool = False, depot_slot: int | None = None) -> bool:
    """Validate a state's invariants; with ``final`` also tour acceptance.

    A final frontier must have no odd vertex, the depot (when it sits in
    the last column at ``depot_slot``) collected, and exactly one open
    component -- unless the tour already closed (DONE), in which case none.
    """
    if state == DONE:
        return True
    par, comp = state
    if len(par) != len(comp):
        return False
    for p, c in zip(par, comp):
        if (p == PARITY_ZERO) != (c == 0):
            return False
    if _canonical(list(par), list(comp)) != (tuple(par), tuple(comp)):
        return False
    if not final:
        return True
    comps = set()
    for i, (p, c) in enumerate(zip(par, comp)):
        if p == PARITY_ODD:
            return False
        if depot_slot is not None and i == depot_slot and p != PARITY_EVEN:
            return False
        if c:
            comps.add(c)
    return len(comps) == 1


@dataclass
class DPStats:
    """Run statistics of one dynamic-program solve."""

    layers: int
    peak_states: int
    expansions: int
    elapsed_ms: float
    engine: str
    state_bound: int | None = None


@dataclass
class SolveResult:
    cost: int
    subgraph: TourSubgraph
    tour: Tour
    stats: DPStats


class ResourceCapExceeded(RuntimeError):
    """The solve hit a configured cap; carries the partial statistics."""

    def __init__(self, reason: str, stats: DPStats):
        super().__init__(reason)
        self.reason = reason
        self.stats = stats


@dataclass(frozen=True)
class _EdgeSpec:
    grid: GridEdge
    transitions: tuple[tuple[tuple, int, str], ...]  # (transform key, scaled cost, kind)


def _edge_specs(instance: PickingInstance) -> tuple[list[_EdgeSpec], int | None, int]:
    """Per-edge transition lists with memoization keys, the index of the
    depot's exit edge (None when the depot sits in the last column), and
    the cost scale.

    Costs are scaled by a constant with a one-unit penalty on gap splits
    of sub-aisles whose canonical largest gap touches an intersection:
    such splits are reachable (the state spaces must match the exhaustive
    enumeration) but an optimal solution avoiding them always exists, and
    preferring it keeps every optimum expressible on the reduced instance.
    """
    lay = instance.layout
    dep = instance.depot
    offsets: dict[tuple[int, int], list[int]] = {}
    for p in instance.products:
        offsets.setdefault((p.aisle, p.block), []).append(p.offset)
    edges = edge_order(lay)
    depot_exit_idx = None
    for idx, e in enumerate(edges):
        if e.axis == "horizontal" and e.column == dep.aisle and e.row == dep.cross_aisle:
            depot_exit_idx = idx
            break
    scale = len(edges) + 1
    specs = []
    for idx, e in enumerate(edges):
        trans = []
        if e.axis == "vertical":
            offs = sorted(offsets.get((e.column, e.row), []))
            degenerate_split = False
            if len(offs) >= 2:
                chain = [0] + offs + [lay.sub_aisle_length]
                gaps = [(b - a, i) for i, (a, b) in enumerate(zip(chain, chain[1:]))]
                best = max(gaps, key=lambda g: (g[0], -g[1]))
                degenerate_split = best[1] in (0, len(chain) - 2)
            for tr in vertical_transitions(lay.sub_aisle_length, offs):
                penalty = 1 if (tr.kind == "gap_split" and degenerate_split) else 0
                trans.append((("v", e.row, tr.kind), tr.length * scale + penalty, tr.kind))
        else:
            depot_exit = idx == depot_exit_idx
            close_allowed = depot_exit_idx is not None and idx >= depot_exit_idx
            for mult, tr in enumerate(horizontal_transitions(lay.aisle_pitch)):
                trans.append(
                    (("h", e.row, mult, depot_exit, close_allowed), tr.length * scale, tr.kind)
                )
        specs.append(_EdgeSpec(e, tuple(trans)))
    return specs, depot_exit_idx, scale


def _transform(key: tuple, state):
    if key[0] == "v":
        return _apply_vertical(state, key[1], key[2])
    return _apply_horizontal(state, key[1], key[2], key[3], key[4])


def state_space_bound(h: int) -> int:
    """Upper bound on distinct states per layer: parity labels times
    non-crossing partitions, plus the closed sentinel."""
    return len(enumerate_states(h)[0]) + 1


@lru_cache(maxsize=None)
def enumerate_states(h: int):
    """All canonical frontier states for ``h`` cross-aisles, with an index map."""
    states: list[State] = []
    for par in itertools.product((PARITY_ZERO, PARITY_EVEN, PARITY_ODD), repeat=h):
        nonzero = [i for i, p in enumerate(par) if p != PARITY_ZERO]
        comps: list[list[int]] = [[]]
        for _pos in nonzero:
            new: list[list[int]] = []
            for partial in comps:
                top = max(partial, default=0)
                for c in range(1, top + 2):
                    new.append(partial + [c])
            comps = new
        for assign in comps:
            comp = [0] * h
            for pos, c in zip(nonzero, assign):
                comp[pos] = c
            cand = _canonical(list(par), comp)
            if cand is not None and cand == (par, tuple(comp)):
                states.append(cand)
    states.sort()
    index = {s: i for i, s in enumerate(states)}
    return states, index


# ---------------------------------------------------------------------------
# hash-map engine (reference; any h)
# ---------------------------------------------------------------------------

def _solve_dict(specs, h, caps, stats):
    init: State = ((PARITY_ZERO,) * h, (0,) * h)
    cur: dict = {init: 0}
    backptrs: list[dict] = []
    memo: dict[tuple, dict] = {}
    bp_entries = 0
    max_entries = caps
    missing = object()
    for spec in specs:
        nxt: dict = {}
        bpl: dict = {}
        for t_idx, (key, cost, _kind) in enumerate(spec.transitions):
            table = memo.setdefault(key, {})
            for s, c in cur.items():
                t = table.get(s, missing)
                if t is missing:
                    t = _transform(key, s)
                    table[s] = t
                if t is None:
                    continue
                c2 = c + cost
                old = nxt.get(t)
                if old is None or c2 < old:
                    nxt[t] = c2
                    bpl[t] = (s, t_idx)
        stats.expansions += len(cur) * len(spec.transitions)
        backptrs.append(bpl)
        bp_entries += len(bpl)
        cur = nxt
        if len(cur) > stats.peak_states:
            stats.peak_states = len(cur)
        if max_entries is not None and bp_entries + 2 * len(cur) > max_entries:
            raise ResourceCapExceeded(
                f"state tables exceeded the configured cap after "
                f"{len(backptrs)} of {len(specs)} layers",
                stats,
            )
        if not cur:
            break
    return cur, backptrs


def _best_final(cur: dict, depot_slot: int | None):
    best = None
    for s, c in sorted(cur.items(), key=lambda kv: (kv[1], repr(kv[0]))):
        if check_state(s, final=True, depot_slot=depot_slot):
            best = (c, s)
            break
    return best


def _backtrack_dict(specs, backptrs, final_state):
    kinds: list[str] = []
    t = final_state
    for spec, bpl in zip(reversed(specs), reversed(backptrs)):
        s, t_idx = bpl[t]
        kinds.append(spec.transitions[t_idx][2])
        t = s
    kinds.reverse()
    return kinds


# ---------------------------------------------------------------------------
# dense array engine (h small enough to enumerate the state space)
# ---------------------------------------------------------------------------

DENSE_MAX_H = 6

_dense_tables: dict = {}


def _target_vector(h: int, key: tuple):
    """Transform targets over the full state space as an index array.

    Built directly only for base keys; the depot-exit and no-close
    horizontal variants are derived by masking (a depot exit additionally
    forbids zero-parity sources; forbidding closes turns DONE targets
    invalid), and the skip kinds are identity maps.
    """
    import numpy as np

    cached = _dense_tables.get((h, "tgt", key))
    if cached is not None:
        return cached
    states, index = enumerate_states(h)
    n = len(states)
    done_idx = n
    if key[0] == "v" and key[2] == "none":
        target = np.arange(n + 1, dtype=np.int64)
    elif key[0] == "h" and (key[3] or not key[4]):
        _tag, slot, mult, depot_exit, _close = key
        base = _target_vector(h, ("h", slot, mult, False, True)).copy()
        if not key[4]:  # closes forbidden: DONE targets become invalid
            base[:done_idx][base[:done_idx] == done_idx] = -1
        if depot_exit:
            zero_par = np.fromiter(
                (s[0][slot] == PARITY_ZERO for s in states), dtype=bool, count=n
            )
            if mult == 0:
                base[:done_idx][zero_par] = -1
            base[done_idx] = -1
        target = base
    else:
        target = np.full(n + 1, -1, dtype=np.int64)
        transform = _transform
        for i, s in enumerate(states):
            t = transform(key, s)
            if t is not None:
                target[i] = done_idx if t is DONE or t == DONE else index[t]
        if _transform(key, DONE) is not None:
            target[done_idx] = done_idx
    _dense_tables[(h, "tgt", key)] = target
    return target


def _dense_table(h: int, key: tuple):
    """Gather/scatter tables of one transform over the full state space."""
    import numpy as np

    cached = _dense_tables.get((h, key))
    if cached is not None:
        return cached
    target = _target_vector(h, key)
    valid = np.nonzero(target >= 0)[0]
    order = valid[np.argsort(target[valid], kind="stable")]
    tgt_sorted = target[order]
    boundaries = np.nonzero(np.diff(tgt_sorted))[0] + 1
    starts = np.concatenate(([0], boundaries))
    tgt_unique = tgt_sorted[starts]
    entry = (order, starts, tgt_unique)
    _dense_tables[(h, key)] = entry
    return entry


def _final_mask(h: int, depot_slot: int | None):
    import numpy as np

    key = ("final", h, depot_slot)
    cached = _dense_tables.get(key)
    if cached is not None:
        return cached
    states, _ = enumerate_states(h)
    mask = np.zeros(len(states) + 1, dtype=bool)
    for i, s in enumerate(states):
        mask[i] = check_state(s, final=True, depot_slot=depot_slot)
    mask[len(states)] = True  # DONE
    _dense_tables[key] = mask
    return mask


def _solve_dense(specs, h, depot_slot, stats):
    import numpy as np

    states, index = enumerate_states(h)
    n1 = len(states) + 1
    init_idx = index[((PARITY_ZERO,) * h, (0,) * h)]
    inf = np.inf
    cur = np.full(n1, inf)
    cur[init_idx] = 0.0

    # Checkpoint the cost array at every column start; the backward pass
    # replays one column at a time instead of keeping all layers.
    checkpoints: list[tuple[int, object]] = []
    column_starts = [i for i, sp in enumerate(specs) if sp.grid.axis == "vertical" and sp.grid.row == 0]
    column_starts.append(len(specs))

    def run_edges(arr, lo, hi, keep):
        seq = []
        for e in range(lo, hi):
            nxt = np.full(n1, inf)
            for key, cost, _kind in specs[e].transitions:
                order, starts, tgt = _dense_table(h, key)
                vals = arr[order] + cost
                mins = np.minimum.reduceat(vals, starts)
                nxt[tgt] = np.minimum(nxt[tgt], mins)
            if keep:
                seq.append(nxt)
            live = int(np.isfinite(nxt).sum())
            stats.expansions += int(np.isfinite(arr).sum()) * len(specs[e].transitions)
            if live > stats.peak_states:
                stats.peak_states = live
            arr = nxt
        return arr, seq

    for ci in range(len(column_starts) - 1):
        checkpoints.append((column_starts[ci], cur.copy()))
        cur, _ = run_edges(cur, column_starts[ci], column_starts[ci + 1], keep=False)

    mask = _final_mask(h, depot_slot)
    masked = np.where(mask, cur, inf)
    if not np.isfinite(masked).any():
        return None, None
    best_idx = int(np.argmin(masked))
    best_cost = masked[best_idx]

    # Backward pass, one column at a time.
    kinds: list[str] = [""] * len(specs)
    t_idx, t_cost = best_idx, best_cost
    for ci in range(len(column_starts) - 2, -1, -1):
        lo, hi = column_starts[ci], column_starts[ci + 1]
        start_arr = checkpoints[ci][1]
        _, seq = run_edges(start_arr.copy(), lo, hi, keep=True)
        layers = [start_arr] + seq
        for e in range(hi - 1, lo - 1, -1):
            prev = layers[e - lo]
            found = False
            for key, cost, kind in specs[e].transitions:
                order, starts, tgt = _dense_table(h, key)
                pos = int(np.searchsorted(tgt, t_idx))
                if pos >= len(tgt) or tgt[pos] != t_idx:
                    continue
                end = starts[pos + 1] if pos + 1 < len(starts) else len(order)
                for s in order[starts[pos]:end]:
                    if prev[s] + cost == t_cost:
                        kinds[e] = kind
                        t_idx, t_cost = int(s), prev[s]
                        found = True
                        break
                if found:
                    break
            if not found:
                raise AssertionError("dense backtrack lost the optimal path")
    return float(best_cost), kinds


# ---------------------------------------------------------------------------
# materialization
# ---------------------------------------------------------------------------

def _materialize(graph: SteinerGraph, specs, kinds) -> TourSubgraph:
    """Turn the chosen per-edge kinds into concrete edge multiplicities."""
    pos_id = graph.position_id  # type: ignore[attr-defined]
    by_sub = graph.products_by_subaisle  # type: ignore[attr-defined]
    mult: dict[tuple[int, int], int] = {}

    def add(u, v, m):
        key = (u, v) if u < v else (v, u)
        mult[key] = mult.get(key, 0) + m

    for spec, kind in zip(specs, kinds):
        e = spec.grid
        if e.axis == "horizontal":
            m = HORIZONTAL_KINDS.index(kind)
            if m:
                add(pos_id[(e.column, e.row)], pos_id[(e.column + 1, e.row)], m)
            continue
        if kind == "none":
            continue
        chain = [pos_id[(e.column, e.row)]]
        chain += by_sub.get((e.column, e.row), [])
        chain.append(pos_id[(e.column, e.row + 1)])
        links = list(zip(chain, chain[1:]))
        if kind == "single":
            for u, v in links:
                add(u, v, 1)
        elif kind == "double":
            for u, v in links:
                add(u, v, 2)
        elif kind == "top_return":
            for u, v in links[1:]:
                add(u, v, 2)
        elif kind == "bottom_return":
            for u, v in links[:-1]:
                add(u, v, 2)
        elif kind == "gap_split":
            ys = [graph.vertices[c].y for c in chain]
            gaps = [(ys[i + 1] - ys[i], i) for i in range(1, len(chain) - 2)]
            split = max(gaps, key=lambda g: (g[0], -g[1]))[1]
            for u, v in links[:split]:
                add(u, v, 2)
            for u, v in links[split + 1:]:
                add(u, v, 2)
        else:
            raise ValueError(f"unknown kind {kind!r}")
    return TourSubgraph(mult)


_DICT_ENTRY_BYTES = 160  # rough per-entry footprint of the hash-map tables


def solve_dp(
    instance: PickingInstance,
    *,
    max_cross_aisles: int = 9,
    max_table_bytes: int | None = 4 << 30,
    engine: str = "auto",
) -> SolveResult:
    """Solve a picking instance exactly and reconstruct an optimal tour.

    ``engine`` selects "dict" (hash-map layers, any h), "dense" (full
    state-space arrays, h <= 6) or "auto". Exceeding ``max_cross_aisles``
    or the state-table byte cap raises ResourceCapExceeded with the
    statistics gathered so far instead of exhausting memory.
    """
    lay = instance.layout
    h = lay.cross_aisles
    t0 = time.perf_counter()
    stats = DPStats(0, 0, 0, 0.0, engine, state_bound=None)
    if h > max_cross_aisles:
        stats.elapsed_ms = (time.perf_counter() - t0) * 1000
        raise ResourceCapExceeded(
            f"{h} cross-aisles exceed the configured maximum of {max_cross_aisles}",
            stats,
        )

    graph = build_steiner_graph(instance)
    specs, depot_exit_idx, scale = _edge_specs(instance)
    stats.layers = len(specs)
    depot_slot = instance.depot.cross_aisle if depot_exit_idx is None else None

    if instance.n == 0:
        stats.engine = "trivial"
        stats.elapsed_ms = (time.perf_counter() - t0) * 1000
        return SolveResult(0, TourSubgraph({}), Tour((graph.depot,), 0), stats)

    if engine == "auto":
        engine = "dense" if h <= DENSE_MAX_H else "dict"
    stats.engine = engine
    if engine == "dense":
        stats.state_bound = state_space_bound(h)
        cost, kinds = _solve_dense(specs, h, depot_slot, stats)
        if cost is None:
            raise AssertionError("no feasible tour subgraph found")
        cost = int(round(cost)) // scale
    elif engine == "dict":
        stats.state_bound = None if h > 16 else state_space_bound(h)
        caps = None if max_table_bytes is None else max_table_bytes // _DICT_ENTRY_BYTES
        try:
            final_table, backptrs = _solve_dict(specs, h, caps, stats)
        except ResourceCapExceeded:
            stats.elapsed_ms = (time.perf_counter() - t0) * 1000
            raise
        best = _best_final(final_table, depot_slot)
        if best is None:
            raise AssertionError("no feasible tour subgraph found")
        cost, final_state = best
        cost //= scale
        kinds = _backtrack_dict(specs, backptrs, final_state)
    else:
        raise ValueError(f"unknown engine {engine!r}")

    subgraph = _materialize(graph, specs, kinds)
    checked = validate_tour_subgraph(graph, subgraph)
    if checked != cost:
        raise AssertionError(
            f"reconstructed subgraph length {checked} != optimal value {cost}"
        )
    tour = euler_tour(graph, subgraph)
    if tour.length != cost:
        raise AssertionError("directed walk length disagrees with the optimum")
    stats.elapsed_ms = (time.perf_counter() - t0) * 1000
    return SolveResult(cost, subgraph, tour, stats)


def layer_states(instance: PickingInstance) -> list[set]:
    """Reachable state set per layer (introspection for verification)."""
    h = instance.layout.cross_aisles
    specs, _, _scale = _edge_specs(instance)
    init: State = ((PARITY_ZERO,) * h, (0,) * h)
    cur = {init}
    out = [set(cur)]
    memo: dict[tuple, dict] = {}
    for spec in specs:
        nxt = set()
        for key, _cost, _kind in spec.transitions:
            table = memo.setdefault(key, {})
            for s in cur:
                if s not in table:
                    table[s] = _transform(key, s)
                t = table[s]
                if t is not None:
                    nxt.add(t)
        cur = nxt
        out.append(set(cur))
    return out
