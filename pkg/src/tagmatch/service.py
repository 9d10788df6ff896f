"""HTTP service exposing the matching engine.

All read endpoints are pure functions of immutable startup state plus the
append-only annotation log. Annotation submissions are flushed and fsynced to
the log before they are acknowledged, so killing the process never loses an
acked record: a restart replays the log into an identical store.

Responses are serialized with the same canonical encoder the CLI and library
use, so the three paths return byte-identical payloads.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response

from . import payloads
from .agreement import AgreementLevel, AgreementPolicy, TopKRule
from .errors import TagMatchError, UnknownCatalog
from .evaluation import PredictionRecord, evaluate, human_tags_from_store
from .metric import MetricConfig
from .schema import TagSchema, canonical_schema, load_schema
from .tagspace import (
    AnnotationStore,
    AssetCatalog,
    TagVector,
    annotation_to_dict,
    load_annotations,
    load_catalog,
    parse_annotation,
    validate_tags,
)

LEVELS = {level.value: level for level in AgreementLevel}
TOPK_RULES = {rule.value: rule for rule in TopKRule}


@dataclass(frozen=True)
class ServiceConfig:
    catalog_paths: dict[str, str]
    store_path: str
    schema_path: str | None = None
    metric_config: MetricConfig = MetricConfig()
    cors_origins: tuple[str, ...] = ()


class EngineState:
    """Loaded schema/catalogs plus the annotation log behind a writer lock."""

    def __init__(self, config: ServiceConfig):
        self.config = config
        if config.schema_path:
            with open(config.schema_path, "rb") as handle:
                self.schema: TagSchema = load_schema(handle)
        else:
            self.schema = canonical_schema()
        self.catalogs: dict[str, AssetCatalog] = {}
        for catalog_id, path in config.catalog_paths.items():
            with open(path, "rb") as handle:
                self.catalogs[catalog_id] = load_catalog(handle, self.schema, catalog_id=catalog_id)
        self._log_lock = threading.Lock()
        if not os.path.exists(config.store_path):
            with open(config.store_path, "w", encoding="utf-8"):
                pass
        with open(config.store_path, "rb") as handle:
            self.store: AnnotationStore = load_annotations(handle, self.schema)

    def catalog(self, catalog_id: str) -> AssetCatalog:
        catalog = self.catalogs.get(catalog_id)
        if catalog is None:
            raise UnknownCatalog(f"unknown catalog {catalog_id!r}", catalog_id=catalog_id)
        return catalog

    def append_annotation(self, annotation) -> None:
        line = json.dumps(annotation_to_dict(annotation), sort_keys=True)
        with self._log_lock:
            with open(self.config.store_path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")
                handle.flush()
                os.fsync(handle.fileno())
            self.store = self.store.merge([annotation])


class RequestError(Exception):
    def __init__(self, status: int, code: str, message: str, detail: dict | None = None):
        super().__init__(message)
        self.status = status
        self.body = {"code": code, "message": message, "detail": detail or {}}


def _json_response(payload, status: int = 200) -> Response:
    return Response(
        content=payloads.canonical_dumps(payload),
        status_code=status,
        media_type="application/json",
    )


async def _read_body(request: Request) -> dict:
    try:
        body = json.loads(await request.body())
    except json.JSONDecodeError as exc:
        raise RequestError(400, "malformed_request", f"body is not valid JSON: {exc}")
    if not isinstance(body, dict):
        raise RequestError(400, "malformed_request", "body must be a JSON object")
    return body


def _require_tags(body: dict, key: str, schema: TagSchema) -> TagVector:
    raw = body.get(key)
    if not isinstance(raw, dict):
        raise RequestError(400, "malformed_request", f"{key} must be an object of {{attribute: index}}")
    tags = TagVector.from_dict(raw)
    violations = validate_tags(tags, schema)
    if violations:
        raise RequestError(
            400,
            "invalid_tags",
            "tags fail schema validation",
            {"violations": [v.message for v in violations]},
        )
    return tags


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the service; every referenced file must load or this raises."""
    state = EngineState(config)
    app = FastAPI(title="tagmatch", docs_url=None, redoc_url=None)
    app.state.engine = state

    if config.cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    @app.exception_handler(RequestError)
    async def _request_error(_request, exc: RequestError):
        return _json_response(exc.body, status=exc.status)

    @app.exception_handler(TagMatchError)
    async def _domain_error(_request, exc: TagMatchError):
        status = 404 if isinstance(exc, UnknownCatalog) else 400
        return _json_response(exc.payload(), status=status)

    @app.get("/healthz")
    async def healthz():
        return _json_response({"status": "ok"})

    @app.get("/schema")
    async def get_schema():
        return _json_response(payloads.schema_payload(state.schema))

    @app.get("/catalogs")
    async def get_catalogs():
        return _json_response(
            [
                {"catalog_id": catalog_id, "assets": len(catalog)}
                for catalog_id, catalog in sorted(state.catalogs.items())
            ]
        )

    @app.get("/catalogs/{catalog_id}/assets")
    async def get_catalog_assets(catalog_id: str):
        return _json_response(payloads.catalog_payload(state.catalog(catalog_id)))

    @app.post("/match")
    async def post_match(request: Request):
        body = await _read_body(request)
        catalog = state.catalog(str(body.get("catalog_id")))
        k = body.get("k", 5)
        if not isinstance(k, int) or k < 1:
            raise RequestError(400, "malformed_request", "k must be a positive integer")
        tags = _require_tags(body, "tags", state.schema)
        payload = payloads.match_payload(tags, catalog, k, state.schema, config.metric_config)
        return _json_response(payload)

    @app.post("/annotations")
    async def post_annotation(request: Request):
        body = await _read_body(request)
        try:
            annotation = parse_annotation(body)
        except TagMatchError as exc:
            raise RequestError(400, exc.code, exc.message, exc.detail)
        violations = validate_tags(annotation.tags, state.schema)
        if violations:
            raise RequestError(
                400,
                "invalid_tags",
                "annotation tags fail schema validation",
                {"violations": [v.message for v in violations]},
            )
        state.append_annotation(annotation)
        return _json_response(
            {
                "status": "accepted",
                "annotator_id": annotation.annotator_id,
                "subject_id": annotation.subject_id,
                "created_at": annotation.created_at,
            }
        )

    @app.get("/subjects/{subject_id}/annotations")
    async def get_subject_annotations(subject_id: str):
        annotations = state.store.for_subject(subject_id)
        return _json_response(
            {"subject_id": subject_id, "annotations": payloads.annotations_payload(annotations)}
        )

    @app.get("/agreement")
    async def get_agreement(
        catalog_id: str,
        k: int = 4,
        level: str = "per_attribute",
        quorum: int = 2,
        topk_rule: str = "shared",
    ):
        if level not in LEVELS:
            raise RequestError(400, "malformed_request", f"level must be one of {sorted(LEVELS)}")
        if topk_rule not in TOPK_RULES:
            raise RequestError(400, "malformed_request", f"topk_rule must be one of {sorted(TOPK_RULES)}")
        policy = AgreementPolicy(level=LEVELS[level], topk_rule=TOPK_RULES[topk_rule], quorum=quorum)
        payload = payloads.agreement_payload(
            state.store, state.catalog(catalog_id), k, policy, state.schema, config.metric_config
        )
        return _json_response(payload)

    @app.post("/eval")
    async def post_eval(request: Request):
        body = await _read_body(request)
        catalog = state.catalog(str(body.get("catalog_id")))
        k = body.get("k", 5)
        if not isinstance(k, int) or k < 1:
            raise RequestError(400, "malformed_request", "k must be a positive integer")
        predictions_raw = body.get("predictions")
        human_raw = body.get("human_annotations")
        if not isinstance(predictions_raw, list) or not isinstance(human_raw, list):
            raise RequestError(
                400, "malformed_request", "predictions and human_annotations must be lists"
            )
        predictions = []
        for entry in predictions_raw:
            if not isinstance(entry, dict) or "subject_id" not in entry:
                raise RequestError(400, "malformed_request", "prediction entries need a subject_id")
            if "predicted_tags" in entry:
                tags = _require_tags(entry, "predicted_tags", state.schema)
                predictions.append(PredictionRecord(subject_id=entry["subject_id"], predicted_tags=tags))
            elif "ranking" in entry and isinstance(entry["ranking"], list):
                predictions.append(
                    PredictionRecord(
                        subject_id=entry["subject_id"],
                        predicted_asset_ranking=tuple(entry["ranking"]),
                    )
                )
            else:
                raise RequestError(
                    400, "malformed_request", "prediction entries need predicted_tags or ranking"
                )
        annotations = []
        for line_no, entry in enumerate(human_raw, start=1):
            try:
                annotation = parse_annotation(entry, line_no)
            except TagMatchError as exc:
                raise RequestError(400, exc.code, exc.message, exc.detail)
            violations = validate_tags(annotation.tags, state.schema)
            if violations:
                raise RequestError(
                    400,
                    "invalid_tags",
                    f"human annotation {line_no} fails schema validation",
                    {"violations": [v.message for v in violations]},
                )
            annotations.append(annotation)
        human_store = AnnotationStore(annotations)
        human_tags = human_tags_from_store(human_store, state.schema)
        summary = evaluate(predictions, human_tags, catalog, k, state.schema, config.metric_config)
        return _json_response(payloads.eval_payload(summary, catalog.catalog_id))

    return app
