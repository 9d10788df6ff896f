"""Multi-annotator label aggregation and agreement statistics.

"Agreement exists" on a set of labels when at least ``quorum`` annotators gave
the same label. Subject-level agreement is judged either per attribute (every
attribute must clear the quorum independently) or on whole vectors. Top-K
agreement asks instead whether annotators' independently derived Top-K asset
sets overlap: either some asset shared by at least ``quorum`` annotators, or a
non-empty intersection across all of them.

All tie-breaking is by option index, never annotator order, so every report
is invariant under permuting the annotators.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Hashable, Sequence

from .errors import EmptyInput, NoEligibleSubjects, SchemaMismatch, TooFewValues
from .metric import MetricConfig
from .schema import TagSchema
from .search import rank_assets
from .tagspace import AnnotationStore, AssetCatalog, TagVector, validate_tags


class AgreementLevel(Enum):
    PER_ATTRIBUTE = "per_attribute"
    WHOLE_VECTOR = "whole_vector"


class TopKRule(Enum):
    SHARED_BY_AT_LEAST_TWO = "shared"
    NON_EMPTY_INTERSECTION_OF_ALL = "intersection"


@dataclass(frozen=True)
class AgreementPolicy:
    level: AgreementLevel = AgreementLevel.PER_ATTRIBUTE
    topk_rule: TopKRule = TopKRule.SHARED_BY_AT_LEAST_TWO
    quorum: int = 2

    def __post_init__(self):
        if self.quorum < 2:
            raise ValueError("quorum must be >= 2")


@dataclass(frozen=True)
class AgreementReport:
    subjects_total: int
    subjects_agreeing: int
    rate: Fraction
    per_attribute_rates: dict[str, Fraction] | None = None


def aggregate_majority(tags_by_annotator: Sequence[TagVector], schema: TagSchema) -> TagVector:
    """Per-attribute majority vote; ties go to the lowest option index."""
    if not tags_by_annotator:
        raise EmptyInput("majority aggregation needs at least one vector")
    for vector in tags_by_annotator:
        report = validate_tags(vector, schema)
        if report:
            raise SchemaMismatch(
                f"vector fails schema validation: {'; '.join(v.message for v in report)}",
                violations=[v.message for v in report],
            )
    winners: dict[str, int] = {}
    for attr in schema.attributes:
        counts = Counter(v.get(attr.id) for v in tags_by_annotator)
        best = max(counts.items(), key=lambda item: (item[1], -item[0]))
        winners[attr.id] = best[0]
    return TagVector.from_dict(winners)


def agreement_exists(values: Sequence[Hashable], quorum: int = 2) -> bool:
    """True iff some label occurs at least ``quorum`` times."""
    if len(values) < 2:
        raise TooFewValues(f"need at least 2 values, got {len(values)}")
    counts = Counter(values)
    return max(counts.values()) >= quorum


def _eligible_subjects(store: AnnotationStore):
    eligible = []
    for subject_id in store.subject_ids():
        annotations = store.for_subject(subject_id)
        if len(annotations) >= 2:
            eligible.append(annotations)
    if not eligible:
        raise NoEligibleSubjects("no subject has two or more annotations")
    return eligible


def tag_agreement_report(
    store: AnnotationStore,
    schema: TagSchema,
    policy: AgreementPolicy = AgreementPolicy(),
) -> AgreementReport:
    """Agreement rate over all subjects with at least two annotations."""
    eligible = _eligible_subjects(store)
    agreeing = 0
    attr_agree: Counter[str] = Counter()
    for annotations in eligible:
        vectors = [a.tags for a in annotations]
        if policy.level is AgreementLevel.WHOLE_VECTOR:
            if agreement_exists(vectors, policy.quorum):
                agreeing += 1
        else:
            all_agree = True
            for attr in schema.attributes:
                values = [v.get(attr.id) for v in vectors]
                if agreement_exists(values, policy.quorum):
                    attr_agree[attr.id] += 1
                else:
                    all_agree = False
            if all_agree:
                agreeing += 1
    total = len(eligible)
    per_attribute = None
    if policy.level is AgreementLevel.PER_ATTRIBUTE:
        per_attribute = {
            attr.id: Fraction(attr_agree[attr.id], total) for attr in schema.attributes
        }
    return AgreementReport(
        subjects_total=total,
        subjects_agreeing=agreeing,
        rate=Fraction(agreeing, total),
        per_attribute_rates=per_attribute,
    )


def topk_agreement_report(
    store: AnnotationStore,
    catalog: AssetCatalog,
    k: int,
    policy: AgreementPolicy,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> AgreementReport:
    """Agreement on overlapping Top-K asset sets, per eligible subject."""
    eligible = _eligible_subjects(store)
    agreeing = 0
    for annotations in eligible:
        topk_sets = [
            {m.asset_id for m in rank_assets(a.tags, catalog, k, schema, config)}
            for a in annotations
        ]
        if policy.topk_rule is TopKRule.NON_EMPTY_INTERSECTION_OF_ALL:
            shared = set.intersection(*topk_sets)
            if shared:
                agreeing += 1
        else:
            counts: Counter[str] = Counter()
            for asset_ids in topk_sets:
                counts.update(asset_ids)
            if counts and max(counts.values()) >= policy.quorum:
                agreeing += 1
    total = len(eligible)
    return AgreementReport(
        subjects_total=total,
        subjects_agreeing=agreeing,
        rate=Fraction(agreeing, total),
    )
