"""Instance text format and the seeded benchmark-class generator.

The file format is one JSON document per instance with normative field
names: ``v``, ``h``, ``L``, ``w``, ``depot`` ({c, a, kind}), ``products``
(list of {a, b, o}) and an optional ``meta`` ({class, seed}).
Serialization is canonical, so identical instances yield byte-identical
files.

Generator classes mirror the published parameter grids. The geometry the
original benchmarks used is not stated anywhere, so slots-per-sub-aisle,
sub-aisle length and aisle pitch are explicit parameters with documented
defaults; generated classes are parameter-compatible with the published
ones, not instance-identical.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace

from .geometry import Depot, InstanceError, PickingInstance, ProductLocation, WarehouseLayout


class FormatError(ValueError):
    """Instance text violates the schema; the message names the field."""


def serialize(instance: PickingInstance) -> str:
    lay = instance.layout
    doc: dict = {
        "v": lay.aisles,
        "h": lay.cross_aisles,
        "L": lay.sub_aisle_length,
        "w": lay.aisle_pitch,
        "depot": {
            "c": instance.depot.cross_aisle,
            "a": instance.depot.aisle,
            "kind": instance.depot.kind,
        },
        "products": [{"a": p.aisle, "b": p.block, "o": p.offset} for p in instance.products],
    }
    if instance.meta is not None:
        doc["meta"] = instance.meta
    return json.dumps(doc, indent=2) + "\n"


def _require(doc: dict, name: str, kind) -> object:
    if name not in doc:
        raise FormatError(f"missing field: {name}")
    value = doc[name]
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise FormatError(f"field {name} must be an integer, got {value!r}")
    if kind is dict and not isinstance(value, dict):
        raise FormatError(f"field {name} must be an object, got {value!r}")
    if kind is list and not isinstance(value, list):
        raise FormatError(f"field {name} must be a list, got {value!r}")
    if kind is str and not isinstance(value, str):
        raise FormatError(f"field {name} must be a string, got {value!r}")
    return value


def parse(text: str) -> PickingInstance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise FormatError("top-level value must be an object")
    v = _require(doc, "v", int)
    h = _require(doc, "h", int)
    L = _require(doc, "L", int)
    w = _require(doc, "w", int)
    depot_doc = _require(doc, "depot", dict)
    c = _require(depot_doc, "c", int)
    a = _require(depot_doc, "a", int)
    kind = _require(depot_doc, "kind", str)
    products_doc = _require(doc, "products", list)
    products = []
    for idx, p in enumerate(products_doc):
        if not isinstance(p, dict):
            raise FormatError(f"products[{idx}] must be an object")
        products.append(
            ProductLocation(
                _require(p, "a", int), _require(p, "b", int), _require(p, "o", int)
            )
        )
    meta = doc.get("meta")
    try:
        layout = WarehouseLayout(v, h, L, w)
        depot = Depot(c, a, kind)
        return PickingInstance(layout, depot, tuple(products), meta)
    except InstanceError as exc:
        raise FormatError(str(exc)) from exc


THEYS_SLOTS_PER_SUBAISLE = 10
SCHOLZ_SLOTS_PER_SUBAISLE = 45
DEFAULT_AISLE_PITCH = 2
HOT_ZONE_SHARE = 0.20
HOT_PICK_SHARE = 0.80


@dataclass(frozen=True)
class InstanceClass:
    """One benchmark class: grid sizes, picking-list size, policies, geometry.

    Published grids: aisles in {5, 15, 60}, cross-aisles in {3, 6, 11},
    products in {15, 60, 240}, policy random or volume, depot central or
    decentral. ``slots_per_subaisle`` fixes the geometry: slots sit at
    offsets 1..slots, the sub-aisle length is slots + 1.
    """

    aisles: int
    cross_aisles: int
    products: int
    policy: str = "random"  # "random" | "volume"
    depot_kind: str = "central"
    slots_per_subaisle: int = THEYS_SLOTS_PER_SUBAISLE
    aisle_pitch: int = DEFAULT_AISLE_PITCH
    hot_pick_share: float = HOT_PICK_SHARE

    def __post_init__(self) -> None:
        if self.policy not in ("random", "volume"):
            raise InstanceError(f"unknown storage policy {self.policy!r}")
        if self.depot_kind not in ("central", "decentral"):
            raise InstanceError(f"unknown depot kind {self.depot_kind!r}")

    @property
    def label(self) -> str:
        pol = "R" if self.policy == "random" else "V"
        return f"{self.aisles}_{self.cross_aisles}_{self.products}_{pol}_{self.depot_kind}"

    def layout(self) -> WarehouseLayout:
        return WarehouseLayout(
            self.aisles, self.cross_aisles, self.slots_per_subaisle + 1, self.aisle_pitch
        )


def scholz_class(aisles: int, products: int) -> InstanceClass:
    """Single-block classes: 45 slots per sub-aisle, two cross-aisles,
    decentral depot; aisles in {5,10,...,30}, products in {30,...,90}."""
    return InstanceClass(
        aisles,
        2,
        products,
        policy="random",
        depot_kind="decentral",
        slots_per_subaisle=SCHOLZ_SLOTS_PER_SUBAISLE,
    )


def parse_class(text: str) -> InstanceClass:
    """Parse a CLI class descriptor "v,h,n,policy,depot"."""
    parts = text.split(",")
    if len(parts) != 5:
        raise FormatError(
            f"class descriptor must be v,h,n,policy,depot - got {text!r}"
        )
    try:
        v, h, n = int(parts[0]), int(parts[1]), int(parts[2])
    except ValueError as exc:
        raise FormatError(f"class sizes must be integers in {text!r}") from exc
    policy = {"r": "random", "random": "random", "v": "volume", "volume": "volume"}.get(
        parts[3].strip().lower()
    )
    if policy is None:
        raise FormatError(f"unknown policy {parts[3]!r}")
    depot = parts[4].strip().lower()
    if depot not in ("central", "decentral"):
        raise FormatError(f"unknown depot kind {parts[4]!r}")
    return InstanceClass(v, h, n, policy, depot)


def generate(cls: InstanceClass, seed: int) -> PickingInstance:
    """Generate one instance; the seed fully determines the output.

    Slots are every integer offset 1..slots in every sub-aisle. Random
    policy samples picks uniformly without replacement. Volume policy
    draws a hot share of the picks (default 80%) from the 20% of slots
    nearest the depot's cross-aisle and the rest uniformly from the
    remaining slots.
    """
    layout = cls.layout()
    depot = Depot(
        0, layout.aisles // 2 if cls.depot_kind == "central" else 0, cls.depot_kind
    )
    slots = [
        ProductLocation(a, b, o)
        for a in range(layout.aisles)
        for b in range(layout.blocks)
        for o in range(1, cls.slots_per_subaisle + 1)
    ]
    if cls.products > len(slots):
        raise InstanceError(
            f"{cls.products} products exceed the {len(slots)} available slots"
        )
    rng = random.Random(seed)
    if cls.policy == "random":
        picks = rng.sample(slots, cls.products)
    else:
        by_distance = sorted(
            slots, key=lambda p: (p.block * layout.sub_aisle_length + p.offset, p.aisle)
        )
        hot_count = max(1, round(HOT_ZONE_SHARE * len(slots)))
        hot, cold = by_distance[:hot_count], by_distance[hot_count:]
        want_hot = min(round(cls.hot_pick_share * cls.products), len(hot), cls.products)
        picks = rng.sample(hot, want_hot)
        picks += rng.sample(cold, cls.products - want_hot)
    picks.sort()
    meta = {"class": cls.label, "seed": seed}
    return PickingInstance(layout, depot, tuple(picks), meta)
