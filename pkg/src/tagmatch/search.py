"""Top-K asset ranking and multi-catalog retargeting.

Catalogs number in the hundreds, so ranking is an exhaustive scan: score every
asset, stable-sort by (score, catalog order), take the prefix. Ties resolve by
catalog file order, which makes results reproducible for a fixed file.
Retargeting runs the same ranking independently per catalog; scores are never
comparable across catalogs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyCatalog, SchemaMismatch
from .metric import CompiledMetric, MetricConfig
from .schema import TagSchema
from .tagspace import AssetCatalog, TagVector, validate_tags


@dataclass(frozen=True)
class RankedMatch:
    asset_id: str
    score: Fraction
    rank: int  # 1-based, no gaps


def rank_assets(
    query: TagVector,
    catalog: AssetCatalog,
    k: int,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> list[RankedMatch]:
    """Return the min(k, catalog size) closest assets, deterministically."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if len(catalog) == 0:
        raise EmptyCatalog(f"catalog {catalog.catalog_id!r} has no assets", catalog_id=catalog.catalog_id)
    report = validate_tags(query, schema)
    if report:
        raise SchemaMismatch(
            f"query fails schema validation: {'; '.join(v.message for v in report)}",
            violations=[v.message for v in report],
        )
    scorer = CompiledMetric(schema, config)
    qv = query._mapping()
    scored = [
        (scorer.total(qv, asset.tags._mapping()), order, asset.asset_id)
        for order, asset in enumerate(catalog.assets)
    ]
    scored.sort(key=lambda item: (item[0], item[1]))
    return [
        RankedMatch(asset_id=asset_id, score=score, rank=rank)
        for rank, (score, _, asset_id) in enumerate(scored[:k], start=1)
    ]


def best_match(
    query: TagVector,
    catalog: AssetCatalog,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> RankedMatch:
    return rank_assets(query, catalog, 1, schema, config)[0]


def retarget(
    query: TagVector,
    catalogs: list[AssetCatalog],
    k: int,
    schema: TagSchema,
    config: MetricConfig = MetricConfig(),
) -> dict[str, list[RankedMatch]]:
    """Rank the same query against several catalogs independently."""
    if not catalogs:
        raise EmptyCatalog("retarget requires at least one catalog")
    result: dict[str, list[RankedMatch]] = {}
    for catalog in catalogs:
        try:
            result[catalog.catalog_id] = rank_assets(query, catalog, k, schema, config)
        except (EmptyCatalog, SchemaMismatch) as exc:
            exc.detail["catalog_id"] = catalog.catalog_id
            raise
    return result
