"""Weighted tag distance between two tag vectors.

The distance is a weighted sum of per-attribute distances: L1 on option
indices for continuous attributes (optionally normalized by cardinality-1 so
each attribute contributes at most its weight), zero-one for discrete ones.
Gated attributes are skipped when the gate is closed on both sides (default)
or always counted, per :class:`MetricConfig`.

All arithmetic is exact (``fractions.Fraction``); floats appear only at
presentation boundaries. Skipping closed gates buys intuitive scores but
costs the triangle inequality; AlwaysCount restores it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import IndexOutOfRange, SchemaMismatch
from .schema import AttributeDef, AttributeKind, TagSchema
from .tagspace import TagVector, validate_tags

ZERO = Fraction(0)
ONE = Fraction(1)


class ContinuousNorm(Enum):
    NORMALIZED = "normalized"  # |a-b| / (cardinality-1)
    RAW = "raw"                # |a-b|


class GateRule(Enum):
    SKIP_WHEN_BOTH_CLOSED = "skip"
    ALWAYS_COUNT = "always"


@dataclass(frozen=True)
class MetricConfig:
    continuous_normalization: ContinuousNorm = ContinuousNorm.NORMALIZED
    gate_rule: GateRule = GateRule.SKIP_WHEN_BOTH_CLOSED


@dataclass(frozen=True)
class AttributeComponent:
    raw: Fraction       # unweighted per-attribute distance
    weighted: Fraction  # raw * weight, zero when not applicable
    applicable: bool


@dataclass(frozen=True)
class DistanceBreakdown:
    total: Fraction
    per_attribute: dict[str, AttributeComponent]


def attribute_distance(
    attr: AttributeDef, a: int, b: int, config: MetricConfig = MetricConfig()
) -> Fraction:
    """Distance between two option indices of one attribute."""
    for index in (a, b):
        if not 0 <= index < attr.cardinality:
            raise IndexOutOfRange(
                f"index {index} out of range for {attr.id!r} (cardinality {attr.cardinality})",
                attribute=attr.id,
                index=index,
            )
    if attr.kind is AttributeKind.DISCRETE:
        return ZERO if a == b else ONE
    diff = abs(a - b)
    if config.continuous_normalization is ContinuousNorm.NORMALIZED:
        return Fraction(diff, attr.cardinality - 1)
    return Fraction(diff)


def _check(tags: TagVector, schema: TagSchema, side: str) -> dict[str, int]:
    report = validate_tags(tags, schema)
    if report:
        raise SchemaMismatch(
            f"{side} vector fails schema validation: {'; '.join(v.message for v in report)}",
            side=side,
            violations=[v.message for v in report],
        )
    return tags.as_dict()


def _gate_open(attr: AttributeDef, x: dict[str, int], y: dict[str, int]) -> bool:
    gate_id, gate_option = attr.gated_by  # type: ignore[misc]
    return x[gate_id] == gate_option or y[gate_id] == gate_option


def distance(
    x: TagVector, y: TagVector, schema: TagSchema, config: MetricConfig = MetricConfig()
) -> DistanceBreakdown:
    """Weighted tag distance with a per-attribute breakdown.

    An attribute counts toward the total when it is applicable: ungated
    attributes always are; gated ones only when the gate rule says so or one
    side holds the gate-opening option.
    """
    xv = _check(x, schema, "x")
    yv = _check(y, schema, "y")
    total = ZERO
    per_attribute: dict[str, AttributeComponent] = {}
    for attr in schema.attributes:
        applicable = (
            attr.gated_by is None
            or config.gate_rule is GateRule.ALWAYS_COUNT
            or _gate_open(attr, xv, yv)
        )
        if applicable:
            raw = attribute_distance(attr, xv[attr.id], yv[attr.id], config)
            weighted = attr.weight * raw
            total += weighted
        else:
            raw = ZERO
            weighted = ZERO
        per_attribute[attr.id] = AttributeComponent(raw=raw, weighted=weighted, applicable=applicable)
    return DistanceBreakdown(total=total, per_attribute=per_attribute)


class CompiledMetric:
    """Precompiled scorer for one (schema, config) pair.

    Computes the same totals as :func:`distance` using a single integer
    accumulator over a fixed common denominator. Inputs are assumed already
    validated; used by the search hot loop.
    """

    def __init__(self, schema: TagSchema, config: MetricConfig = MetricConfig()):
        self.schema = schema
        self.config = config
        denominators = []
        for attr in schema.attributes:
            unit = attr.weight
            if (
                attr.kind is AttributeKind.CONTINUOUS
                and config.continuous_normalization is ContinuousNorm.NORMALIZED
            ):
                unit = unit / (attr.cardinality - 1)
            denominators.append(unit.denominator)
        self.lcd = math.lcm(*denominators) if denominators else 1
        lcd = self.lcd
        # Per attribute: (id, kind, scaled unit, gate id, gate option)
        self._plan = []
        for attr in schema.attributes:
            unit = attr.weight
            if (
                attr.kind is AttributeKind.CONTINUOUS
                and config.continuous_normalization is ContinuousNorm.NORMALIZED
            ):
                unit = unit / (attr.cardinality - 1)
            scaled = unit * lcd
            assert scaled.denominator == 1
            gate_id, gate_option = attr.gated_by if attr.gated_by else (None, -1)
            self._plan.append(
                (attr.id, attr.kind is AttributeKind.DISCRETE, scaled.numerator, gate_id, gate_option)
            )
        self._skip_closed = config.gate_rule is GateRule.SKIP_WHEN_BOTH_CLOSED

    def total(self, xv: dict[str, int], yv: dict[str, int]) -> Fraction:
        acc = 0
        for attr_id, is_discrete, unit, gate_id, gate_option in self._plan:
            if (
                gate_id is not None
                and self._skip_closed
                and xv[gate_id] != gate_option
                and yv[gate_id] != gate_option
            ):
                continue
            a = xv[attr_id]
            b = yv[attr_id]
            if a == b:
                continue
            acc += unit if is_discrete else unit * abs(a - b)
        return Fraction(acc, self.lcd)
