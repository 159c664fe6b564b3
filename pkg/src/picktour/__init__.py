"""Exact picker-routing solvers for rectangular warehouses."""

from .geometry import (
    Depot,
    InstanceError,
    PickingInstance,
    ProductLocation,
    WarehouseLayout,
    central_depot,
    decentral_depot,
)
from .graph import (
    SteinerGraph,
    Tour,
    TourSubgraph,
    build_steiner_graph,
    enumerate_shortest_paths,
    metric_closure,
    shortest_distance,
    validate_tour_subgraph,
)

__all__ = [
    "Depot",
    "InstanceError",
    "PickingInstance",
    "ProductLocation",
    "WarehouseLayout",
    "central_depot",
    "decentral_depot",
    "SteinerGraph",
    "Tour",
    "TourSubgraph",
    "build_steiner_graph",
    "enumerate_shortest_paths",
    "metric_closure",
    "shortest_distance",
    "validate_tour_subgraph",
]
