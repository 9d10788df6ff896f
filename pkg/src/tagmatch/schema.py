"""Tag schema model: attribute definitions, validation, (de)serialization.

A schema is an ordered list of attributes. Each attribute has a fixed option
list, a positive rational weight, a distance kind (continuous or discrete),
and optionally a gate: a (attribute id, option index) pair marking it as
meaningful only when the gating attribute holds that option. Weights are kept
as exact fractions so downstream distance totals are reproducible bit-for-bit.

The built-in hairstyle schema (9 attributes across the top-front, side, and
braid regions) ships as ``data/hairstyle_schema_v1.json`` and is returned by
:func:`canonical_schema`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from importlib import resources
from typing import IO, Union

from .errors import InvalidSchema, MalformedFile

CANONICAL_SCHEMA_RESOURCE = "hairstyle_schema_v1.json"


class AttributeKind(Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


@dataclass(frozen=True)
class AttributeDef:
    """One tag attribute: a named, weighted, fixed-cardinality option list."""

    id: str
    region: str
    display_name: str
    options: tuple[str, ...]
    weight: Fraction
    kind: AttributeKind
    gated_by: tuple[str, int] | None = None

    @property
    def cardinality(self) -> int:
        return len(self.options)


@dataclass(frozen=True)
class TagSchema:
    """Ordered, immutable attribute universe. Order is significant."""

    name: str
    version: str
    attributes: tuple[AttributeDef, ...]
    _by_id: dict[str, AttributeDef] = field(
        init=False, repr=False, compare=False, hash=False, default_factory=dict
    )

    def __post_init__(self):
        _validate_attributes(self.attributes)
        object.__setattr__(self, "_by_id", {a.id: a for a in self.attributes})

    def attribute(self, attr_id: str) -> AttributeDef:
        return self._by_id[attr_id]

    def has_attribute(self, attr_id: str) -> bool:
        return attr_id in self._by_id

    @property
    def attribute_ids(self) -> tuple[str, ...]:
        return tuple(a.id for a in self.attributes)


def _validate_attributes(attributes: tuple[AttributeDef, ...]) -> None:
    seen: set[str] = set()
    for attr in attributes:
        if attr.id in seen:
            raise InvalidSchema(
                f"duplicate attribute id {attr.id!r}", attribute=attr.id, rule="unique_ids"
            )
        seen.add(attr.id)
    by_id = {a.id: a for a in attributes}
    for attr in attributes:
        if len(attr.options) < 2:
            raise InvalidSchema(
                f"attribute {attr.id!r} needs at least 2 options",
                attribute=attr.id,
                rule="min_cardinality",
            )
        if len(set(attr.options)) != len(attr.options):
            raise InvalidSchema(
                f"attribute {attr.id!r} has duplicate option labels",
                attribute=attr.id,
                rule="unique_options",
            )
        if attr.weight <= 0:
            raise InvalidSchema(
                f"attribute {attr.id!r} weight must be > 0",
                attribute=attr.id,
                rule="positive_weight",
            )
        if attr.gated_by is not None:
            gate_id, gate_option = attr.gated_by
            gate = by_id.get(gate_id)
            if gate is None:
                raise InvalidSchema(
                    f"attribute {attr.id!r} gated by unknown attribute {gate_id!r}",
                    attribute=attr.id,
                    rule="gate_exists",
                )
            if gate.kind is not AttributeKind.DISCRETE:
                raise InvalidSchema(
                    f"attribute {attr.id!r} gated by non-discrete attribute {gate_id!r}",
                    attribute=attr.id,
                    rule="gate_discrete",
                )
            if not 0 <= gate_option < gate.cardinality:
                raise InvalidSchema(
                    f"attribute {attr.id!r} gate option {gate_option} out of range for {gate_id!r}",
                    attribute=attr.id,
                    rule="gate_option_range",
                )
            if gate.gated_by is not None:
                raise InvalidSchema(
                    f"attribute {attr.id!r} gated by {gate_id!r}, which is itself gated",
                    attribute=attr.id,
                    rule="gate_depth",
                )


_ATTRIBUTE_FIELDS = {"id", "region", "display_name", "options", "weight", "kind", "gated_by"}
_SCHEMA_FIELDS = {"name", "version", "attributes"}
_GATE_FIELDS = {"attribute", "option"}


def _parse_attribute(raw: object) -> AttributeDef:
    if not isinstance(raw, dict):
        raise MalformedFile("attribute entry is not an object")
    unknown = set(raw) - _ATTRIBUTE_FIELDS
    if unknown:
        raise MalformedFile(f"unknown attribute fields: {sorted(unknown)}")
    missing = _ATTRIBUTE_FIELDS - set(raw)
    if missing:
        raise MalformedFile(f"missing attribute fields: {sorted(missing)}")
    attr_id = raw["id"]
    if not isinstance(attr_id, str) or not attr_id:
        raise MalformedFile("attribute id must be a non-empty string")
    options = raw["options"]
    if not isinstance(options, list) or not all(isinstance(o, str) for o in options):
        raise MalformedFile(f"attribute {attr_id!r}: options must be a list of strings")
    weight_raw = raw["weight"]
    if not isinstance(weight_raw, str):
        raise MalformedFile(f"attribute {attr_id!r}: weight must be a string rational")
    try:
        weight = Fraction(weight_raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise MalformedFile(f"attribute {attr_id!r}: bad weight {weight_raw!r}: {exc}")
    kind_raw = raw["kind"]
    try:
        kind = AttributeKind(kind_raw)
    except ValueError:
        raise MalformedFile(f"attribute {attr_id!r}: kind must be 'continuous' or 'discrete'")
    gate_raw = raw["gated_by"]
    gated_by = None
    if gate_raw is not None:
        if not isinstance(gate_raw, dict) or set(gate_raw) != _GATE_FIELDS:
            raise MalformedFile(f"attribute {attr_id!r}: gated_by must be {{attribute, option}}")
        if not isinstance(gate_raw["attribute"], str) or not isinstance(gate_raw["option"], int):
            raise MalformedFile(f"attribute {attr_id!r}: gated_by fields have wrong types")
        gated_by = (gate_raw["attribute"], gate_raw["option"])
    return AttributeDef(
        id=attr_id,
        region=str(raw["region"]),
        display_name=str(raw["display_name"]),
        options=tuple(options),
        weight=weight,
        kind=kind,
        gated_by=gated_by,
    )


def load_schema(source: Union[bytes, str, IO]) -> TagSchema:
    """Parse a schema file (strict: unknown fields are rejected).

    Raises MalformedFile on syntax/shape problems, InvalidSchema when the
    parsed schema violates an invariant.
    """
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    try:
        raw = json.loads(source)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"schema file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise MalformedFile("schema file must contain a JSON object")
    unknown = set(raw) - _SCHEMA_FIELDS
    if unknown:
        raise MalformedFile(f"unknown schema fields: {sorted(unknown)}")
    missing = _SCHEMA_FIELDS - set(raw)
    if missing:
        raise MalformedFile(f"missing schema fields: {sorted(missing)}")
    if not isinstance(raw["name"], str) or not isinstance(raw["version"], str):
        raise MalformedFile("schema name and version must be strings")
    if not isinstance(raw["attributes"], list) or not raw["attributes"]:
        raise MalformedFile("schema attributes must be a non-empty list")
    attributes = tuple(_parse_attribute(entry) for entry in raw["attributes"])
    return TagSchema(name=raw["name"], version=raw["version"], attributes=attributes)


def _weight_str(weight: Fraction) -> str:
    # Prefer the decimal form when it is exact, else num/den.
    num, den = weight.numerator, weight.denominator
    if den == 1:
        return str(num)
    d = den
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d == 1:
        scale = 1
        places = 0
        while scale % den != 0:
            scale *= 10
            places += 1
        digits = num * scale // den
        text = f"{digits:0{places + 1}d}"
        return f"{text[:-places]}.{text[-places:]}"
    return f"{num}/{den}"


def schema_to_dict(schema: TagSchema) -> dict:
    """Plain-JSON form of a schema, matching the schema file layout."""
    return {
        "name": schema.name,
        "version": schema.version,
        "attributes": [
            {
                "id": a.id,
                "region": a.region,
                "display_name": a.display_name,
                "options": list(a.options),
                "weight": _weight_str(a.weight),
                "kind": a.kind.value,
                "gated_by": None
                if a.gated_by is None
                else {"attribute": a.gated_by[0], "option": a.gated_by[1]},
            }
            for a in schema.attributes
        ],
    }


def serialize_schema(schema: TagSchema) -> str:
    return json.dumps(schema_to_dict(schema), indent=2, ensure_ascii=False) + "\n"


def permutation_count(schema: TagSchema) -> int:
    """Number of raw tag assignments: the product of attribute cardinalities.

    Gating is ignored; the count is over unconstrained assignments.
    """
    return math.prod(a.cardinality for a in schema.attributes)


def canonical_schema() -> TagSchema:
    """The built-in 9-attribute hairstyle schema."""
    data = resources.files("tagmatch.data").joinpath(CANONICAL_SCHEMA_RESOURCE).read_bytes()
    return load_schema(data)
