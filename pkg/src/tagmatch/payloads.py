"""Canonical JSON payloads and text tables.

Every machine-readable result the engine emits is built here, from exactly one
function per payload kind, and serialized by :func:`canonical_dumps`. The CLI
prints these strings, the HTTP service returns them verbatim, and library
callers get the same bytes, which is what makes the three access paths
byte-identical.

Scores and rates are exact fractions internally and decimal strings on the
wire: exact expansion when finite, else half-even rounded at 12 places.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Mapping, Sequence

from .agreement import (
    AgreementPolicy,
    AgreementReport,
    tag_agreement_report,
    topk_agreement_report,
)
from .evaluation import EvalSummary
from .metric import DistanceBreakdown, MetricConfig, distance
from .schema import TagSchema, schema_to_dict
from .search import RankedMatch, rank_assets
from .tagspace import AnnotationStore, Annotation, AssetCatalog, TagVector, annotation_to_dict

SCORE_PLACES = 12


def format_fraction(x: Fraction, places: int = SCORE_PLACES) -> str:
    """Decimal string for a rational: exact if finite, else rounded half-even."""
    sign = "-" if x < 0 else ""
    if x < 0:
        x = -x
    scaled = x * 10**places
    q, r = divmod(scaled.numerator, scaled.denominator)
    if 2 * r > scaled.denominator or (2 * r == scaled.denominator and q % 2 == 1):
        q += 1
    digits = str(q).rjust(places + 1, "0")
    int_part, frac_part = digits[:-places], digits[-places:].rstrip("0")
    return sign + int_part + ("." + frac_part if frac_part else "")


def format_percent(x: Fraction, places: int = 1) -> str:
    return f"{float(x) * 100:.{places}f}%"


def canonical_dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


# ---------------------------------------------------------------------------
# payload builders


def schema_payload(schema: TagSchema) -> dict:
    return schema_to_dict(schema)


def breakdown_payload(breakdown: DistanceBreakdown) -> dict:
    return {
        "total": format_fraction(breakdown.total),
        "per_attribute": {
            attr_id: {
                "raw": format_fraction(component.raw),
                "weighted": format_fraction(component.weighted),
                "applicable": component.applicable,
            }
            for attr_id, component in breakdown.per_attribute.items()
        },
    }


def ranked_payload(matches: Sequence[RankedMatch]) -> list[dict]:
    return [
        {"asset_id": m.asset_id, "score": format_fraction(m.score), "rank": m.rank}
        for m in matches
    ]


def match_payload(
    query: TagVector,
    catalog: AssetCatalog,
    k: int,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> dict:
    """Top-K matches with a per-attribute distance breakdown for each."""
    matches = rank_assets(query, catalog, k, schema, config)
    by_id = {asset.asset_id: asset for asset in catalog.assets}
    entries = []
    for m in matches:
        breakdown = distance(query, by_id[m.asset_id].tags, schema, config)
        entry = {
            "asset_id": m.asset_id,
            "score": format_fraction(m.score),
            "rank": m.rank,
            "breakdown": breakdown_payload(breakdown),
        }
        entries.append(entry)
    return {
        "catalog_id": catalog.catalog_id,
        "k": k,
        "query": query.as_dict(),
        "matches": entries,
    }


def retarget_payload(result: Mapping[str, Sequence[RankedMatch]]) -> dict:
    return {catalog_id: ranked_payload(matches) for catalog_id, matches in result.items()}


def _report_payload(report: AgreementReport) -> dict:
    payload = {
        "subjects_total": report.subjects_total,
        "subjects_agreeing": report.subjects_agreeing,
        "rate": format_fraction(report.rate),
    }
    if report.per_attribute_rates is not None:
        payload["per_attribute_rates"] = {
            attr_id: format_fraction(rate) for attr_id, rate in report.per_attribute_rates.items()
        }
    return payload


def agreement_payload(
    store: AnnotationStore,
    catalog: AssetCatalog,
    k_max: int,
    policy: AgreementPolicy,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> dict:
    """Combined agreement report: tag-level row plus Top-1..Top-k_max rows."""
    tag_level = tag_agreement_report(store, schema, policy)
    topk_rows = []
    for k in range(1, k_max + 1):
        report = topk_agreement_report(store, catalog, k, policy, schema, config)
        row = {"k": k}
        row.update(_report_payload(report))
        topk_rows.append(row)
    return {
        "catalog_id": catalog.catalog_id,
        "k_max": k_max,
        "policy": {
            "level": policy.level.value,
            "quorum": policy.quorum,
            "topk_rule": policy.topk_rule.value,
        },
        "tag_level": _report_payload(tag_level),
        "topk": topk_rows,
    }


def eval_payload(summary: EvalSummary, catalog_id: str) -> dict:
    return {
        "catalog_id": catalog_id,
        "k": summary.k,
        "subjects_evaluated": summary.subjects_evaluated,
        "subjects_excluded": summary.subjects_excluded,
        "top1_accuracy": format_fraction(summary.top1_accuracy),
        "topk_accuracy": format_fraction(summary.topk_accuracy),
        "tag_accuracy": None if summary.tag_accuracy is None else format_fraction(summary.tag_accuracy),
        "mean_distance_top1": format_fraction(summary.mean_distance_top1),
        "mean_distance_topk": format_fraction(summary.mean_distance_topk),
        "annotation_floor_top1": format_fraction(summary.annotation_floor_top1),
        "annotation_floor_topk": format_fraction(summary.annotation_floor_topk),
    }


def aggregate_payload(subject_tags: Mapping[str, TagVector]) -> dict:
    return {subject_id: tags.as_dict() for subject_id, tags in sorted(subject_tags.items())}


def annotations_payload(annotations: Sequence[Annotation]) -> list[dict]:
    return [annotation_to_dict(a) for a in annotations]


def catalog_payload(catalog: AssetCatalog) -> dict:
    return {
        "catalog_id": catalog.catalog_id,
        "assets": [{"asset_id": a.asset_id, "tags": a.tags.as_dict()} for a in catalog.assets],
    }


# ---------------------------------------------------------------------------
# human-readable tables


def matches_table(payload: dict) -> str:
    lines = [f"catalog: {payload['catalog_id']}  (top {payload['k']})"]
    lines.append(f"{'rank':>4}  {'asset':<24} score")
    for entry in payload["matches"]:
        lines.append(f"{entry['rank']:>4}  {entry['asset_id']:<24} {entry['score']}")
    return "\n".join(lines)


def ranked_table(entries: Sequence[dict]) -> str:
    lines = [f"{'rank':>4}  {'asset':<24} score"]
    for entry in entries:
        lines.append(f"{entry['rank']:>4}  {entry['asset_id']:<24} {entry['score']}")
    return "\n".join(lines)


def agreement_table(payload: dict) -> str:
    """Plain-text agreement table: one tag-level row, one row per Top-k."""
    lines = [
        f"catalog: {payload['catalog_id']}  "
        f"(level={payload['policy']['level']}, quorum={payload['policy']['quorum']}, "
        f"rule={payload['policy']['topk_rule']})",
        f"{'row':<14} {'agree':>6} / {'total':<6} {'rate':>8}",
    ]
    tag = payload["tag_level"]
    rate = Fraction(tag["subjects_agreeing"], tag["subjects_total"]) if tag["subjects_total"] else Fraction(0)
    lines.append(
        f"{'Tag level':<14} {tag['subjects_agreeing']:>6} / {tag['subjects_total']:<6} "
        f"{format_percent(rate):>8}"
    )
    for row in payload["topk"]:
        rate = Fraction(row["subjects_agreeing"], row["subjects_total"]) if row["subjects_total"] else Fraction(0)
        lines.append(
            f"{'Final Top-' + str(row['k']):<14} {row['subjects_agreeing']:>6} / "
            f"{row['subjects_total']:<6} {format_percent(rate):>8}"
        )
    return "\n".join(lines)


def eval_table(payload: dict) -> str:
    """Plain-text evaluation table: prediction row plus annotation-floor row."""
    k = payload["k"]
    tag_acc = payload["tag_accuracy"]
    header = (
        f"{'row':<12} {'Top-1 Acc':>10} {'Top-' + str(k) + ' Acc':>10} "
        f"{'Tag Acc':>9} {'Dist Top-1':>11} {'Dist Top-' + str(k):>11}"
    )
    def pct(s: str | None) -> str:
        return "NA" if s is None else format_percent(Fraction(s), 2)
    def dist(s: str) -> str:
        return f"{float(Fraction(s)):.2f}"
    lines = [
        f"catalog: {payload['catalog_id']}  subjects: {payload['subjects_evaluated']} "
        f"(excluded: {payload['subjects_excluded']})",
        header,
        f"{'Prediction':<12} {pct(payload['top1_accuracy']):>10} {pct(payload['topk_accuracy']):>10} "
        f"{pct(tag_acc):>9} {dist(payload['mean_distance_top1']):>11} "
        f"{dist(payload['mean_distance_topk']):>11}",
        f"{'Annotation':<12} {'':>10} {'':>10} {'':>9} "
        f"{dist(payload['annotation_floor_top1']):>11} {dist(payload['annotation_floor_topk']):>11}",
    ]
    return "\n".join(lines)
