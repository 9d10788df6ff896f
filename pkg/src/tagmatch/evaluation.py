"""Evaluation of externally produced tag predictions against targets.

Predictions come in two modes sharing one record type: tag mode (a predicted
tag vector, ranked into assets by the search) and direct mode (an explicit
asset ranking). Targets are derived from annotator-provided human tags: the
target asset for a subject is the best match for those tags, so fixtures stay
self-consistent without the original annotation data.

Prediction file format (one JSON object per line):
    {"subject_id": "...", "predicted_tags": {"attr": int, ...}}
or  {"subject_id": "...", "ranking": ["asset_id", ...]}

Subjects that have human tags but no prediction are excluded from every
denominator and surfaced via ``subjects_excluded``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Mapping, Sequence, Union

from .agreement import aggregate_majority
from .errors import InvalidTags, MalformedLine, MissingTarget, UnknownAsset
from .metric import MetricConfig, distance
from .schema import TagSchema
from .search import rank_assets
from .tagspace import AnnotationStore, AssetCatalog, TagVector, validate_tags


@dataclass(frozen=True)
class PredictionRecord:
    subject_id: str
    predicted_tags: TagVector | None = None
    predicted_asset_ranking: tuple[str, ...] | None = None

    def __post_init__(self):
        if (self.predicted_tags is None) == (self.predicted_asset_ranking is None):
            raise ValueError("exactly one of predicted_tags / predicted_asset_ranking required")

    @property
    def is_tag_mode(self) -> bool:
        return self.predicted_tags is not None


@dataclass(frozen=True)
class TagAccuracy:
    overall: Fraction
    per_attribute: dict[str, Fraction]


@dataclass(frozen=True)
class EvalSummary:
    k: int
    subjects_evaluated: int
    subjects_excluded: int
    top1_accuracy: Fraction
    topk_accuracy: Fraction
    tag_accuracy: Fraction | None
    mean_distance_top1: Fraction
    mean_distance_topk: Fraction
    annotation_floor_top1: Fraction
    annotation_floor_topk: Fraction


def load_predictions(source: Union[bytes, str, IO], schema: TagSchema) -> list[PredictionRecord]:
    """Parse a line-oriented prediction file (tag mode or direct mode)."""
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    records: list[PredictionRecord] = []
    for line_no, line in enumerate(source.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedLine(line_no, f"invalid JSON: {exc}")
        if not isinstance(raw, dict) or "subject_id" not in raw:
            raise MalformedLine(line_no, "prediction line needs a subject_id")
        keys = set(raw)
        if keys == {"subject_id", "predicted_tags"}:
            tags_raw = raw["predicted_tags"]
            if not isinstance(tags_raw, dict):
                raise MalformedLine(line_no, "predicted_tags must be an object")
            tags = TagVector.from_dict(tags_raw)
            report = validate_tags(tags, schema)
            if report:
                raise InvalidTags(
                    f"subject {raw['subject_id']!r}: {'; '.join(v.message for v in report)}",
                    subject_id=raw["subject_id"],
                    violations=[v.message for v in report],
                )
            records.append(PredictionRecord(subject_id=raw["subject_id"], predicted_tags=tags))
        elif keys == {"subject_id", "ranking"}:
            ranking = raw["ranking"]
            if not isinstance(ranking, list) or not all(isinstance(a, str) for a in ranking):
                raise MalformedLine(line_no, "ranking must be a list of asset ids")
            records.append(
                PredictionRecord(subject_id=raw["subject_id"], predicted_asset_ranking=tuple(ranking))
            )
        else:
            raise MalformedLine(
                line_no, "prediction line must be {subject_id, predicted_tags} or {subject_id, ranking}"
            )
    return records


def _predicted_topk(
    record: PredictionRecord,
    catalog: AssetCatalog,
    k: int,
    schema: TagSchema,
    config: MetricConfig,
) -> list[str]:
    if record.is_tag_mode:
        matches = rank_assets(record.predicted_tags, catalog, k, schema, config)
        return [m.asset_id for m in matches]
    return list(record.predicted_asset_ranking[:k])


def topk_accuracy(
    predictions: Sequence[PredictionRecord],
    targets: Mapping[str, str],
    catalog: AssetCatalog,
    k: int,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> Fraction:
    """Fraction of subjects whose target asset appears in the Top-k list."""
    if not predictions:
        raise MissingTarget("no predictions to evaluate")
    catalog_ids = set(catalog.asset_ids())
    hits = 0
    for record in predictions:
        target = targets.get(record.subject_id)
        if target is None:
            raise MissingTarget(
                f"subject {record.subject_id!r} has no target asset", subject_id=record.subject_id
            )
        if target not in catalog_ids:
            raise UnknownAsset(
                f"target asset {target!r} not in catalog {catalog.catalog_id!r}",
                asset_id=target,
                catalog_id=catalog.catalog_id,
            )
        if target in _predicted_topk(record, catalog, k, schema, config):
            hits += 1
    return Fraction(hits, len(predictions))


def tag_accuracy(
    predictions: Sequence[PredictionRecord],
    tag_targets: Mapping[str, TagVector],
    schema: TagSchema,
) -> TagAccuracy:
    """Exact-match rate over (subject, attribute) pairs, overall and per attribute."""
    if not predictions:
        raise MissingTarget("no predictions to evaluate")
    attr_hits = {attr.id: 0 for attr in schema.attributes}
    total_subjects = 0
    for record in predictions:
        if not record.is_tag_mode:
            raise ValueError("tag_accuracy applies to tag-mode predictions only")
        target = tag_targets.get(record.subject_id)
        if target is None:
            raise MissingTarget(
                f"subject {record.subject_id!r} has no tag target", subject_id=record.subject_id
            )
        total_subjects += 1
        for attr in schema.attributes:
            if record.predicted_tags.get(attr.id) == target.get(attr.id):
                attr_hits[attr.id] += 1
    n_attrs = len(schema.attributes)
    overall = Fraction(sum(attr_hits.values()), total_subjects * n_attrs)
    per_attribute = {
        attr_id: Fraction(hits, total_subjects) for attr_id, hits in attr_hits.items()
    }
    return TagAccuracy(overall=overall, per_attribute=per_attribute)


def mean_match_distance(
    predictions: Sequence[PredictionRecord],
    human_tags: Mapping[str, TagVector],
    catalog: AssetCatalog,
    k: int,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> Fraction:
    """Mean distance from each subject's human tags to its Top-k predicted assets."""
    if not predictions:
        raise MissingTarget("no predictions to evaluate")
    by_id = {asset.asset_id: asset for asset in catalog.assets}
    total = Fraction(0)
    count = 0
    for record in predictions:
        human = human_tags.get(record.subject_id)
        if human is None:
            raise MissingTarget(
                f"subject {record.subject_id!r} has no human tags", subject_id=record.subject_id
            )
        for asset_id in _predicted_topk(record, catalog, k, schema, config):
            asset = by_id.get(asset_id)
            if asset is None:
                raise UnknownAsset(
                    f"predicted asset {asset_id!r} not in catalog {catalog.catalog_id!r}",
                    asset_id=asset_id,
                    catalog_id=catalog.catalog_id,
                )
            total += distance(human, asset.tags, schema, config).total
            count += 1
    return total / count


def annotation_floor(
    human_tags: Mapping[str, TagVector],
    catalog: AssetCatalog,
    k: int,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> Fraction:
    """Mean Top-k distance when the prediction is the human tags themselves."""
    predictions = [
        PredictionRecord(subject_id=subject_id, predicted_tags=tags)
        for subject_id, tags in sorted(human_tags.items())
    ]
    return mean_match_distance(predictions, human_tags, catalog, k, schema, config)


def human_tags_from_store(store: AnnotationStore, schema: TagSchema) -> dict[str, TagVector]:
    """One tag vector per subject: majority vote across that subject's annotators."""
    result: dict[str, TagVector] = {}
    for subject_id in store.subject_ids():
        vectors = [a.tags for a in store.for_subject(subject_id)]
        result[subject_id] = aggregate_majority(vectors, schema)
    return result


def derive_targets(
    human_tags: Mapping[str, TagVector],
    catalog: AssetCatalog,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> dict[str, str]:
    """Target asset per subject: the best match for that subject's human tags."""
    matches = {
        subject_id: rank_assets(tags, catalog, 1, schema, config)[0].asset_id
        for subject_id, tags in human_tags.items()
    }
    return matches


def evaluate(
    predictions: Sequence[PredictionRecord],
    human_tags: Mapping[str, TagVector],
    catalog: AssetCatalog,
    k: int,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> EvalSummary:
    """Full evaluation summary for one prediction set.

    Subjects lacking predictions are excluded and counted; predictions
    lacking human tags are an error (MissingTarget).
    """
    missing = [p.subject_id for p in predictions if p.subject_id not in human_tags]
    if missing:
        raise MissingTarget(
            f"predictions without human tags: {missing[:5]}", subject_ids=missing
        )
    evaluated = list(predictions)
    excluded = len(human_tags) - len(evaluated)
    # Floor and targets are computed over exactly the evaluated subjects so
    # the floor <= prediction-distance comparison is like-for-like.
    covered = {p.subject_id: human_tags[p.subject_id] for p in evaluated}
    targets = derive_targets(covered, catalog, schema, config)
    all_tag_mode = all(p.is_tag_mode for p in evaluated)
    return EvalSummary(
        k=k,
        subjects_evaluated=len(evaluated),
        subjects_excluded=excluded,
        top1_accuracy=topk_accuracy(evaluated, targets, catalog, 1, schema, config),
        topk_accuracy=topk_accuracy(evaluated, targets, catalog, k, schema, config),
        tag_accuracy=tag_accuracy(evaluated, covered, schema).overall if all_tag_mode else None,
        mean_distance_top1=mean_match_distance(evaluated, covered, catalog, 1, schema, config),
        mean_distance_topk=mean_match_distance(evaluated, covered, catalog, k, schema, config),
        annotation_floor_top1=annotation_floor(covered, catalog, 1, schema, config),
        annotation_floor_topk=annotation_floor(covered, catalog, k, schema, config),
    )
