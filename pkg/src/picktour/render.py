"""Static SVG rendering of layouts, tours and cut overlays.

Pure string assembly with integer-scaled coordinates, so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

from .geometry import PickingInstance
from .graph import SteinerGraph, TourSubgraph, build_steiner_graph

SCALE = 8
MARGIN = 20


def _xy(graph: SteinerGraph, vid: int, height: int) -> tuple[int, int]:
    vert = graph.vertices[vid]
    lay = graph.layout  # type: ignore[attr-defined]
    x = MARGIN + vert.aisle * lay.aisle_pitch * SCALE
    y = MARGIN + (height - vert.y) * SCALE
    return x, y


def render_svg(
    instance: PickingInstance,
    tour: TourSubgraph | None = None,
    cuts: list | None = None,
) -> str:
    """Draw the warehouse grid, products and depot, with optional tour
    edges (doubled edges as parallel strokes) and cut-arc overlays."""
    graph = build_steiner_graph(instance)
    lay = instance.layout
    height = (lay.cross_aisles - 1) * lay.sub_aisle_length
    width = MARGIN * 2 + (lay.aisles - 1) * lay.aisle_pitch * SCALE
    total_h = MARGIN * 2 + height * SCALE
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{total_h}" '
        f'viewBox="0 0 {width} {total_h}">',
        f'<rect width="{width}" height="{total_h}" fill="white"/>',
    ]
    # Grid: all edges in light gray.
    for u, v, _d in graph.edges:
        x1, y1 = _xy(graph, u, height)
        x2, y2 = _xy(graph, v, height)
        parts.append(
            f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
            f'stroke="#cccccc" stroke-width="1"/>'
        )
    if tour is not None:
        for (u, v), m in sorted(tour.multiplicity.items()):
            x1, y1 = _xy(graph, u, height)
            x2, y2 = _xy(graph, v, height)
            if m == 1:
                parts.append(
                    f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                    f'stroke="#1f77b4" stroke-width="2"/>'
                )
            else:
                # Doubled edge: two parallel strokes offset by 2px.
                dx, dy = (2, 0) if x1 == x2 else (0, 2)
                for s in (-1, 1):
                    parts.append(
                        f'<line x1="{x1 + s * dx}" y1="{y1 + s * dy}" '
                        f'x2="{x2 + s * dx}" y2="{y2 + s * dy}" '
                        f'stroke="#1f77b4" stroke-width="2"/>'
                    )
    if cuts:
        for cut in cuts:
            for (u, v) in cut.arcs:
                x1, y1 = _xy(graph, u, height)
                x2, y2 = _xy(graph, v, height)
                parts.append(
                    f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" '
                    f'stroke="#d62728" stroke-width="2" stroke-dasharray="4 3"/>'
                )
    for vert in graph.vertices:
        x, y = _xy(graph, vert.id, height)
        if vert.kind == "depot":
            parts.append(
                f'<rect x="{x - 5}" y="{y - 5}" width="10" height="10" fill="#2ca02c"/>'
            )
        elif vert.kind == "product":
            parts.append(f'<circle cx="{x}" cy="{y}" r="3" fill="black"/>')
        else:
            parts.append(f'<circle cx="{x}" cy="{y}" r="2" fill="none" stroke="#888888"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
