"""Tag vectors, annotations, asset catalogs, and their flat-file persistence.

File formats (UTF-8, LF, one JSON object per line):
    catalog line:    {"asset_id": "...", "tags": {"attr_id": int, ...}}
    annotation line: {"annotator_id": "...", "subject_id": "...",
                      "subject_kind": "human"|"asset", "tags": {...},
                      "created_at": int}

Vectors always carry every attribute of their governing schema, including
gated ones; the metric decides which values matter. Annotation stores keep
only the latest record per (annotator, subject), later created_at winning and
ingestion order breaking ties.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Union

from .errors import DuplicateAssetId, InvalidTags, MalformedLine
from .schema import TagSchema

SUBJECT_KINDS = ("human", "asset")


@dataclass(frozen=True)
class TagVector:
    """One complete assignment of option indices, keyed by attribute id."""

    items: tuple[tuple[str, int], ...]

    @classmethod
    def from_dict(cls, values: dict[str, int]) -> "TagVector":
        return cls(tuple(sorted(values.items())))

    def get(self, attr_id: str) -> int:
        return self._mapping()[attr_id]

    def as_dict(self) -> dict[str, int]:
        return dict(self._mapping())

    def _mapping(self) -> dict[str, int]:
        # Memoized read-only view; hot paths score thousands of vectors.
        cached = getattr(self, "_cached_map", None)
        if cached is None:
            cached = dict(self.items)
            object.__setattr__(self, "_cached_map", cached)
        return cached

    def replace(self, attr_id: str, index: int) -> "TagVector":
        values = self.as_dict()
        values[attr_id] = index
        return TagVector.from_dict(values)


@dataclass(frozen=True)
class Violation:
    kind: str  # "missing_attribute" | "out_of_range" | "unexpected_attribute"
    attribute: str
    message: str


def validate_tags(tags: TagVector, schema: TagSchema) -> list[Violation]:
    """Report-style validation: empty list iff the vector fits the schema."""
    violations: list[Violation] = []
    values = tags.as_dict()
    for attr in schema.attributes:
        if attr.id not in values:
            violations.append(
                Violation("missing_attribute", attr.id, f"attribute {attr.id!r} missing")
            )
            continue
        index = values.pop(attr.id)
        if not isinstance(index, int) or isinstance(index, bool) or not 0 <= index < attr.cardinality:
            violations.append(
                Violation(
                    "out_of_range",
                    attr.id,
                    f"index {index!r} out of range for {attr.id!r} (cardinality {attr.cardinality})",
                )
            )
    for extra in sorted(values):
        violations.append(
            Violation("unexpected_attribute", extra, f"attribute {extra!r} not in schema")
        )
    return violations


@dataclass(frozen=True)
class Annotation:
    annotator_id: str
    subject_id: str
    subject_kind: str  # "human" | "asset"
    tags: TagVector
    created_at: int


@dataclass(frozen=True)
class Asset:
    asset_id: str
    tags: TagVector


@dataclass(frozen=True)
class AssetCatalog:
    """A rendering system's asset list; order is file order and is stable."""

    catalog_id: str
    assets: tuple[Asset, ...]

    def __len__(self) -> int:
        return len(self.assets)

    def asset_ids(self) -> tuple[str, ...]:
        return tuple(a.asset_id for a in self.assets)

    def get(self, asset_id: str) -> Asset | None:
        for asset in self.assets:
            if asset.asset_id == asset_id:
                return asset
        return None


class AnnotationStore:
    """Annotations grouped by subject, deduplicated last-write-wins.

    Immutable from the outside; ``merge`` returns a new store. Per-subject
    lookups return annotations sorted by annotator_id.
    """

    def __init__(self, annotations: Iterable[Annotation] = ()):
        self._latest: dict[tuple[str, str], Annotation] = {}
        for ann in annotations:
            self._ingest(ann)

    def _ingest(self, ann: Annotation) -> None:
        key = (ann.annotator_id, ann.subject_id)
        current = self._latest.get(key)
        if current is None or ann.created_at >= current.created_at:
            self._latest[key] = ann

    def merge(self, annotations: Iterable[Annotation]) -> "AnnotationStore":
        store = AnnotationStore()
        store._latest = dict(self._latest)
        for ann in annotations:
            store._ingest(ann)
        return store

    def for_subject(self, subject_id: str) -> list[Annotation]:
        found = [a for a in self._latest.values() if a.subject_id == subject_id]
        return sorted(found, key=lambda a: a.annotator_id)

    def subject_ids(self) -> list[str]:
        return sorted({a.subject_id for a in self._latest.values()})

    def annotator_ids(self) -> list[str]:
        return sorted({a.annotator_id for a in self._latest.values()})

    def all(self) -> list[Annotation]:
        return sorted(self._latest.values(), key=lambda a: (a.subject_id, a.annotator_id))

    def __len__(self) -> int:
        return len(self._latest)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnnotationStore):
            return NotImplemented
        return self._latest == other._latest


def _read_lines(source: Union[bytes, str, IO]) -> list[str]:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    return source.splitlines()


def _parse_tags(raw: object, line_no: int) -> TagVector:
    if not isinstance(raw, dict):
        raise MalformedLine(line_no, "tags must be an object")
    for key, value in raw.items():
        if not isinstance(key, str) or not isinstance(value, int) or isinstance(value, bool):
            raise MalformedLine(line_no, f"tag {key!r} must map to an integer index")
    return TagVector.from_dict(raw)


def parse_annotation(raw: dict, line_no: int = 0) -> Annotation:
    """Validate one annotation object (shape only; tags checked separately)."""
    expected = {"annotator_id", "subject_id", "subject_kind", "tags", "created_at"}
    if not isinstance(raw, dict) or set(raw) != expected:
        raise MalformedLine(line_no, f"annotation must have exactly fields {sorted(expected)}")
    if raw["subject_kind"] not in SUBJECT_KINDS:
        raise MalformedLine(line_no, f"subject_kind must be one of {SUBJECT_KINDS}")
    if not isinstance(raw["annotator_id"], str) or not isinstance(raw["subject_id"], str):
        raise MalformedLine(line_no, "annotator_id and subject_id must be strings")
    if not isinstance(raw["created_at"], int) or isinstance(raw["created_at"], bool):
        raise MalformedLine(line_no, "created_at must be an integer timestamp")
    return Annotation(
        annotator_id=raw["annotator_id"],
        subject_id=raw["subject_id"],
        subject_kind=raw["subject_kind"],
        tags=_parse_tags(raw["tags"], line_no),
        created_at=raw["created_at"],
    )


def load_catalog(source: Union[bytes, str, IO], schema: TagSchema, catalog_id: str = "catalog") -> AssetCatalog:
    """Parse a line-oriented catalog file, validating every asset's tags."""
    assets: list[Asset] = []
    seen: set[str] = set()
    for line_no, line in enumerate(_read_lines(source), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc}")
        if not isinstance(raw, dict) or set(raw) != {"asset_id", "tags"}:
            raise MalformedLine(line_no, "catalog line must have exactly {asset_id, tags}")
        asset_id = raw["asset_id"]
        if not isinstance(asset_id, str) or not asset_id:
            raise MalformedLine(line_no, "asset_id must be a non-empty string")
        if asset_id in seen:
            raise DuplicateAssetId(
                f"duplicate asset_id {asset_id!r} on line {line_no}",
                asset_id=asset_id,
                line=line_no,
            )
        seen.add(asset_id)
        tags = _parse_tags(raw["tags"], line_no)
        report = validate_tags(tags, schema)
        if report:
            raise InvalidTags(
                f"asset {asset_id!r}: {'; '.join(v.message for v in report)}",
                asset_id=asset_id,
                violations=[v.message for v in report],
            )
        assets.append(Asset(asset_id=asset_id, tags=tags))
    return AssetCatalog(catalog_id=catalog_id, assets=tuple(assets))


def load_annotations(source: Union[bytes, str, IO], schema: TagSchema) -> AnnotationStore:
    """Parse a line-oriented annotation file into a deduplicated store."""
    annotations: list[Annotation] = []
    for line_no, line in enumerate(_read_lines(source), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc}")
        ann = parse_annotation(raw, line_no)
        report = validate_tags(ann.tags, schema)
        if report:
            raise InvalidTags(
                f"subject {ann.subject_id!r}: {'; '.join(v.message for v in report)}",
                subject_id=ann.subject_id,
                violations=[v.message for v in report],
            )
        annotations.append(ann)
    return AnnotationStore(annotations)


def annotation_to_dict(ann: Annotation) -> dict:
    return {
        "annotator_id": ann.annotator_id,
        "subject_id": ann.subject_id,
        "subject_kind": ann.subject_kind,
        "tags": ann.tags.as_dict(),
        "created_at": ann.created_at,
    }


def dump_catalog(catalog: AssetCatalog) -> str:
    lines = [
        json.dumps({"asset_id": a.asset_id, "tags": a.tags.as_dict()}, sort_keys=True)
        for a in catalog.assets
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def dump_annotations(annotations: Iterable[Annotation]) -> str:
    lines = [json.dumps(annotation_to_dict(a), sort_keys=True) for a in annotations]
    return "\n".join(lines) + ("\n" if lines else "")
