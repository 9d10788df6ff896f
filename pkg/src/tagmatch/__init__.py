"""Tag-based avatar asset matching engine.

Models tag schemas for hairstyle annotation, computes weighted tag distances
between tag vectors, ranks catalog assets Top-K, aggregates multi-annotator
labels, reports agreement and evaluation statistics, and retargets one set of
human tags across several rendering-system catalogs.
"""

from .agreement import (
    AgreementLevel,
    AgreementPolicy,
    AgreementReport,
    TopKRule,
    aggregate_majority,
    agreement_exists,
    tag_agreement_report,
    topk_agreement_report,
)
from .errors import TagMatchError
from .evaluation import (
    EvalSummary,
    PredictionRecord,
    annotation_floor,
    evaluate,
    human_tags_from_store,
    load_predictions,
    mean_match_distance,
    tag_accuracy,
    topk_accuracy,
)
from .metric import (
    ContinuousNorm,
    DistanceBreakdown,
    GateRule,
    MetricConfig,
    attribute_distance,
    distance,
)
from .schema import (
    AttributeDef,
    AttributeKind,
    TagSchema,
    canonical_schema,
    load_schema,
    permutation_count,
    serialize_schema,
)
from .search import RankedMatch, best_match, rank_assets, retarget
from .tagspace import (
    Annotation,
    AnnotationStore,
    Asset,
    AssetCatalog,
    TagVector,
    dump_annotations,
    dump_catalog,
    load_annotations,
    load_catalog,
    validate_tags,
)

__version__ = "0.1.0"
