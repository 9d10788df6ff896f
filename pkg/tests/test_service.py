from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from tagmatch import payloads
from tagmatch.agreement import AgreementPolicy
from tagmatch.evaluation import evaluate, human_tags_from_store, load_predictions
from tagmatch.service import ServiceConfig, create_app
from tagmatch.tagspace import TagVector, load_annotations

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture()
def service(tmp_path, schema):
    log_path = tmp_path / "annotations.jsonl"
    shutil.copy(FIXTURES / "annotations_agreement.jsonl", log_path)
    config = ServiceConfig(
        catalog_paths={
            "bitmoji": str(FIXTURES / "catalog_bitmoji.jsonl"),
            "cartoonset": str(FIXTURES / "catalog_cartoonset.jsonl"),
        },
        store_path=str(log_path),
        cors_origins=("http://localhost:5173",),
    )
    app = create_app(config)
    with TestClient(app) as client:
        yield client, log_path


def full_tags(schema, **overrides) -> dict:
    values = {attr.id: 0 for attr in schema.attributes}
    values.update(overrides)
    return values


class TestReadEndpoints:
    def test_healthz(self, service):
        client, _ = service
        response = client.get("/healthz")
        assert response.status_code == 200
        assert response.json() == {"status": "ok"}

    def test_schema_bytes_are_canonical(self, service, schema):
        client, _ = service
        response = client.get("/schema")
        expected = payloads.canonical_dumps(payloads.schema_payload(schema))
        assert response.content.decode("utf-8") == expected

    def test_catalogs_listing(self, service):
        client, _ = service
        payload = client.get("/catalogs").json()
        assert payload == [
            {"assets": 200, "catalog_id": "bitmoji"},
            {"assets": 120, "catalog_id": "cartoonset"},
        ]

    def test_catalog_assets(self, service, bitmoji_catalog):
        client, _ = service
        payload = client.get("/catalogs/bitmoji/assets").json()
        assert payload["catalog_id"] == "bitmoji"
        assert len(payload["assets"]) == 200
        assert payload["assets"][7]["asset_id"] == "bitmoji_007"

    def test_unknown_catalog_404(self, service):
        client, _ = service
        response = client.get("/catalogs/ghost/assets")
        assert response.status_code == 404
        assert response.json()["code"] == "unknown_catalog"


class TestMatch:
    def test_match_equals_library_payload(self, service, schema, bitmoji_catalog):
        client, _ = service
        query = json.load((FIXTURES / "query_tags.json").open())
        response = client.post("/match", json={"tags": query, "catalog_id": "bitmoji", "k": 5})
        assert response.status_code == 200
        expected = payloads.canonical_dumps(
            payloads.match_payload(TagVector.from_dict(query), bitmoji_catalog, 5, schema)
        )
        assert response.content.decode("utf-8") == expected
        body = response.json()
        assert body["matches"][0]["asset_id"] == "bitmoji_007"
        assert body["matches"][0]["score"] == "0"

    def test_match_invalid_tags(self, service):
        client, _ = service
        response = client.post(
            "/match", json={"tags": {"nope": 1}, "catalog_id": "bitmoji", "k": 5}
        )
        assert response.status_code == 400
        assert response.json()["code"] == "invalid_tags"

    def test_match_bad_k(self, service, schema):
        client, _ = service
        response = client.post(
            "/match", json={"tags": full_tags(schema), "catalog_id": "bitmoji", "k": 0}
        )
        assert response.status_code == 400

    def test_match_unknown_catalog(self, service, schema):
        client, _ = service
        response = client.post(
            "/match", json={"tags": full_tags(schema), "catalog_id": "ghost", "k": 1}
        )
        assert response.status_code == 404

    def test_malformed_body(self, service):
        client, _ = service
        response = client.post("/match", content=b"{nope", headers={"content-type": "application/json"})
        assert response.status_code == 400
        assert response.json()["code"] == "malformed_request"


class TestAnnotations:
    def annotation(self, schema, created_at=123456, **overrides):
        return {
            "annotator_id": "ui_user",
            "subject_id": "subj_new",
            "subject_kind": "human",
            "tags": full_tags(schema, **overrides),
            "created_at": created_at,
        }

    def test_append_then_fetch(self, service, schema):
        client, log_path = service
        body = self.annotation(schema)
        response = client.post("/annotations", json=body)
        assert response.status_code == 200
        assert response.json()["status"] == "accepted"
        fetched = client.get("/subjects/subj_new/annotations").json()
        assert fetched["annotations"] == [body]
        # persisted to the log before the ack
        last_line = json.loads(log_path.read_text().splitlines()[-1])
        assert last_line == body

    def test_last_write_wins_on_resubmit(self, service, schema):
        client, _ = service
        client.post("/annotations", json=self.annotation(schema, created_at=100))
        client.post("/annotations", json=self.annotation(schema, created_at=200, braid_count=2))
        fetched = client.get("/subjects/subj_new/annotations").json()
        assert len(fetched["annotations"]) == 1
        assert fetched["annotations"][0]["created_at"] == 200
        assert fetched["annotations"][0]["tags"]["braid_count"] == 2

    def test_idempotent_retry(self, service, schema):
        client, log_path = service
        body = self.annotation(schema)
        client.post("/annotations", json=body)
        client.post("/annotations", json=body)
        fetched = client.get("/subjects/subj_new/annotations").json()
        assert len(fetched["annotations"]) == 1
        # the log keeps both lines; replay still dedups
        with log_path.open("rb") as handle:
            replayed = load_annotations(handle, schema)
        assert len(replayed.for_subject("subj_new")) == 1

    def test_invalid_annotation_rejected(self, service, schema):
        client, _ = service
        body = self.annotation(schema)
        body["subject_kind"] = "alien"
        response = client.post("/annotations", json=body)
        assert response.status_code == 400

    def test_agreement_reflects_new_annotations(self, service, schema):
        client, _ = service
        before = client.get("/agreement", params={"catalog_id": "bitmoji", "k": 1}).json()
        assert before["tag_level"]["subjects_total"] == 100
        for annotator in ("x", "y"):
            client.post(
                "/annotations",
                json={
                    "annotator_id": annotator,
                    "subject_id": "subj_extra",
                    "subject_kind": "human",
                    "tags": full_tags(schema),
                    "created_at": 1,
                },
            )
        after = client.get("/agreement", params={"catalog_id": "bitmoji", "k": 1}).json()
        assert after["tag_level"]["subjects_total"] == 101


class TestAgreementAndEval:
    def test_agreement_equals_library_payload(self, service, schema, bitmoji_catalog, agreement_store):
        client, _ = service
        response = client.get("/agreement", params={"catalog_id": "bitmoji", "k": 2})
        expected = payloads.canonical_dumps(
            payloads.agreement_payload(
                agreement_store, bitmoji_catalog, 2, AgreementPolicy(), schema
            )
        )
        assert response.content.decode("utf-8") == expected

    def test_eval_equals_library_payload(self, service, schema, bitmoji_catalog):
        client, _ = service
        predictions_raw = [
            json.loads(line)
            for line in (FIXTURES / "predictions_tag.jsonl").read_text().splitlines()
        ]
        human_raw = [
            json.loads(line)
            for line in (FIXTURES / "human_eval.jsonl").read_text().splitlines()
        ]
        response = client.post(
            "/eval",
            json={
                "catalog_id": "bitmoji",
                "k": 5,
                "predictions": predictions_raw,
                "human_annotations": human_raw,
            },
        )
        assert response.status_code == 200
        with (FIXTURES / "predictions_tag.jsonl").open("rb") as handle:
            predictions = load_predictions(handle, schema)
        with (FIXTURES / "human_eval.jsonl").open("rb") as handle:
            store = load_annotations(handle, schema)
        summary = evaluate(
            predictions, human_tags_from_store(store, schema), bitmoji_catalog, 5, schema
        )
        expected = payloads.canonical_dumps(payloads.eval_payload(summary, "bitmoji"))
        assert response.content.decode("utf-8") == expected


class TestCors:
    def test_allowed_origin_gets_header(self, service):
        client, _ = service
        response = client.get("/healthz", headers={"Origin": "http://localhost:5173"})
        assert response.headers.get("access-control-allow-origin") == "http://localhost:5173"

    def test_unlisted_origin_denied(self, service):
        client, _ = service
        response = client.get("/healthz", headers={"Origin": "http://evil.example"})
        assert "access-control-allow-origin" not in response.headers

    def test_no_cors_configured_by_default(self, tmp_path, schema):
        config = ServiceConfig(
            catalog_paths={"bitmoji": str(FIXTURES / "catalog_bitmoji.jsonl")},
            store_path=str(tmp_path / "log.jsonl"),
        )
        with TestClient(create_app(config)) as client:
            response = client.get("/healthz", headers={"Origin": "http://localhost:5173"})
            assert "access-control-allow-origin" not in response.headers


class TestStartup:
    def test_missing_catalog_aborts(self, tmp_path):
        config = ServiceConfig(
            catalog_paths={"bitmoji": str(tmp_path / "missing.jsonl")},
            store_path=str(tmp_path / "log.jsonl"),
        )
        with pytest.raises(OSError):
            create_app(config)

    def test_store_created_when_absent(self, tmp_path):
        log_path = tmp_path / "fresh.jsonl"
        config = ServiceConfig(
            catalog_paths={"bitmoji": str(FIXTURES / "catalog_bitmoji.jsonl")},
            store_path=str(log_path),
        )
        create_app(config)
        assert log_path.exists()
