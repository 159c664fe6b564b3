"""Warehouse geometry and picking instances.

A warehouse is a regular rectangular grid: ``aisles`` vertical aisles
crossed by ``cross_aisles`` horizontal cross-aisles. Products sit inside
the sub-aisle segments between consecutive cross-aisles; cross-aisles are
product-free. Aisles are narrow (both racks of an aisle collapse onto its
center line) and all sub-aisles have the same length.

All distances are non-negative integers. Rational inputs must be
pre-scaled by a common denominator before building an instance; integer
arithmetic keeps every downstream comparison exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class InstanceError(ValueError):
    """Raised when layout, depot or product data violates an invariant."""


DEPOT_KINDS = ("central", "decentral")


@dataclass(frozen=True)
class WarehouseLayout:
    """Grid geometry: aisle/cross-aisle counts and spacing.

    ``sub_aisle_length`` is the distance between two consecutive
    cross-aisles along an aisle; ``aisle_pitch`` is the center-to-center
    distance of two adjacent aisles.
    """

    aisles: int
    cross_aisles: int
    sub_aisle_length: int
    aisle_pitch: int

    def __post_init__(self) -> None:
        if self.aisles < 1:
            raise InstanceError(f"need at least 1 aisle, got {self.aisles}")
        if self.cross_aisles < 2:
            raise InstanceError(
                f"need at least 2 cross-aisles, got {self.cross_aisles}"
            )
        if self.sub_aisle_length < 1 or self.aisle_pitch < 1:
            raise InstanceError("sub_aisle_length and aisle_pitch must be >= 1")
        for name in ("aisles", "cross_aisles", "sub_aisle_length", "aisle_pitch"):
            if not isinstance(getattr(self, name), int):
                raise InstanceError(f"{name} must be an integer")

    @property
    def blocks(self) -> int:
        """Number of sub-aisle segments per aisle."""
        return self.cross_aisles - 1


@dataclass(frozen=True, order=True)
class ProductLocation:
    """A pick position: aisle index, block index and offset in the block.

    The offset is measured upward from the lower cross-aisle of the block
    and must be strictly inside the sub-aisle (a product at offset 0 or at
    the full sub-aisle length would coincide with an intersection).
    """

    aisle: int
    block: int
    offset: int


@dataclass(frozen=True)
class Depot:
    """Depot position: a cross-aisle index and the aisle it is aligned with."""

    cross_aisle: int
    aisle: int
    kind: str = "central"

    def __post_init__(self) -> None:
        if self.kind not in DEPOT_KINDS:
            raise InstanceError(f"depot kind must be one of {DEPOT_KINDS}, got {self.kind!r}")


def central_depot(layout: WarehouseLayout) -> Depot:
    return Depot(cross_aisle=0, aisle=layout.aisles // 2, kind="central")


def decentral_depot(layout: WarehouseLayout) -> Depot:
    return Depot(cross_aisle=0, aisle=0, kind="decentral")


@dataclass(frozen=True)
class PickingInstance:
    """A layout, a depot and the (deduplicated) list of products to pick.

    Duplicate (aisle, block, offset) triples collapse to a single product:
    with narrow aisles both rack sides merge onto one vertex. The original
    input order of first occurrences is preserved, which fixes vertex
    numbering everywhere downstream.
    """

    layout: WarehouseLayout
    depot: Depot
    products: tuple[ProductLocation, ...]
    meta: dict | None = field(default=None, compare=True)

    def __post_init__(self) -> None:
        lay = self.layout
        if not (0 <= self.depot.cross_aisle < lay.cross_aisles):
            raise InstanceError(f"depot cross-aisle {self.depot.cross_aisle} out of range")
        if not (0 <= self.depot.aisle < lay.aisles):
            raise InstanceError(f"depot aisle {self.depot.aisle} out of range")
        seen: set[ProductLocation] = set()
        unique: list[ProductLocation] = []
        for p in self.products:
            if not (0 <= p.aisle < lay.aisles):
                raise InstanceError(f"product aisle {p.aisle} out of range")
            if not (0 <= p.block < lay.blocks):
                raise InstanceError(f"product block {p.block} out of range")
            if not (0 < p.offset < lay.sub_aisle_length):
                raise InstanceError(
                    f"product offset {p.offset} must be strictly between 0 and "
                    f"{lay.sub_aisle_length}"
                )
            if p not in seen:
                seen.add(p)
                unique.append(p)
        object.__setattr__(self, "products", tuple(unique))

    @property
    def n(self) -> int:
        """Number of distinct products (the depot is not counted)."""
        return len(self.products)

    def products_in(self, aisle: int, block: int) -> list[ProductLocation]:
        """Products of one sub-aisle, bottom to top."""
        return sorted(
            (p for p in self.products if p.aisle == aisle and p.block == block),
            key=lambda p: p.offset,
        )

    def with_products(self, products: tuple[ProductLocation, ...]) -> "PickingInstance":
        return PickingInstance(self.layout, self.depot, products, self.meta)
