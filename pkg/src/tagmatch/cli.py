"""Command-line interface.

Subcommands: validate, match, rank, retarget, agree, aggregate, eval, serve.
Machine output goes to stdout as canonical JSON under --json, human tables
otherwise; diagnostics go to stderr. Exit codes: 0 success, 1 domain error,
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import payloads, report
from .agreement import AgreementLevel, AgreementPolicy, TopKRule
from .errors import MalformedFile, TagMatchError
from .evaluation import evaluate, human_tags_from_store, load_predictions
from .metric import ContinuousNorm, GateRule, MetricConfig
from .schema import canonical_schema, load_schema, permutation_count
from .search import rank_assets, retarget
from .tagspace import TagVector, load_annotations, load_catalog

LEVELS = {"per-attribute": AgreementLevel.PER_ATTRIBUTE, "whole-vector": AgreementLevel.WHOLE_VECTOR}
TOPK_RULES = {"shared": TopKRule.SHARED_BY_AT_LEAST_TWO, "intersection": TopKRule.NON_EMPTY_INTERSECTION_OF_ALL}


def _common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--schema", metavar="PATH", help="schema file (default: built-in hairstyle schema)")
    parser.add_argument(
        "--metric-norm", choices=["normalized", "raw"], default="normalized",
        help="continuous attribute distance normalization",
    )
    parser.add_argument(
        "--gate-rule", choices=["skip", "always"], default="skip",
        help="gated attributes: skip when closed on both sides, or always count",
    )
    parser.add_argument("--json", action="store_true", help="emit canonical JSON on stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tagmatch", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate schema, catalog, and annotation files")
    _common_flags(p)
    p.add_argument("--catalog", action="append", default=[], metavar="[ID=]PATH")
    p.add_argument("--annotations", action="append", default=[], metavar="PATH")

    p = sub.add_parser("match", help="top-K matches with per-attribute breakdowns")
    _common_flags(p)
    p.add_argument("--catalog", required=True, metavar="[ID=]PATH")
    p.add_argument("--tags", required=True, metavar="PATH", help="JSON file of {attribute: option index}")
    p.add_argument("-k", type=int, default=5)

    p = sub.add_parser("rank", help="bare ranked asset list")
    _common_flags(p)
    p.add_argument("--catalog", required=True, metavar="[ID=]PATH")
    p.add_argument("--tags", required=True, metavar="PATH")
    p.add_argument("-k", type=int, default=None, help="default: rank the whole catalog")
    p.add_argument("--explain", action="store_true", help="attach per-attribute distance breakdowns")

    p = sub.add_parser("retarget", help="rank the same tags against several catalogs")
    _common_flags(p)
    p.add_argument("--catalog", action="append", required=True, metavar="[ID=]PATH")
    p.add_argument("--tags", required=True, metavar="PATH")
    p.add_argument("-k", type=int, default=5)

    p = sub.add_parser("agree", help="annotator agreement report (tag level + Top-1..K)")
    _common_flags(p)
    p.add_argument("--store", required=True, metavar="PATH", help="annotation file")
    p.add_argument("--catalog", required=True, metavar="[ID=]PATH")
    p.add_argument("-k", type=int, default=4, help="largest Top-K row")
    p.add_argument("--level", choices=sorted(LEVELS), default="per-attribute")
    p.add_argument("--quorum", type=int, default=2)
    p.add_argument("--topk-rule", choices=sorted(TOPK_RULES), default="shared")
    p.add_argument("--report-dir", metavar="DIR", help="write agreement.csv and agreement.png here")

    p = sub.add_parser("aggregate", help="majority-vote aggregation per subject")
    _common_flags(p)
    p.add_argument("--store", required=True, metavar="PATH")
    p.add_argument("--subject", metavar="ID", help="aggregate a single subject")

    p = sub.add_parser("eval", help="evaluate predictions against human tags")
    _common_flags(p)
    p.add_argument("--pred", required=True, metavar="PATH", help="prediction file")
    p.add_argument("--human", required=True, metavar="PATH", help="human annotation file")
    p.add_argument("--catalog", required=True, metavar="[ID=]PATH")
    p.add_argument("-k", type=int, default=5)
    p.add_argument("--report-dir", metavar="DIR", help="write eval.csv and eval.png here")

    p = sub.add_parser("serve", help="run the HTTP service")
    _common_flags(p)
    p.add_argument("--bind", default="127.0.0.1:8008", metavar="HOST:PORT")
    p.add_argument("--catalog", action="append", required=True, metavar="[ID=]PATH")
    p.add_argument("--store", required=True, metavar="PATH", help="append-only annotation log")
    p.add_argument("--cors", action="append", default=[], metavar="ORIGIN")

    p = sub.add_parser("info", help="schema summary and permutation count")
    _common_flags(p)

    return parser


def _load_schema_arg(args):
    if args.schema:
        with open(args.schema, "rb") as handle:
            return load_schema(handle)
    return canonical_schema()


def _metric_config(args) -> MetricConfig:
    return MetricConfig(
        continuous_normalization=ContinuousNorm.NORMALIZED
        if args.metric_norm == "normalized"
        else ContinuousNorm.RAW,
        gate_rule=GateRule.SKIP_WHEN_BOTH_CLOSED if args.gate_rule == "skip" else GateRule.ALWAYS_COUNT,
    )


def _split_catalog_arg(arg: str) -> tuple[str, str]:
    if "=" in arg:
        catalog_id, path = arg.split("=", 1)
        return catalog_id, path
    return Path(arg).stem, arg


def _load_catalog_arg(arg: str, schema):
    catalog_id, path = _split_catalog_arg(arg)
    with open(path, "rb") as handle:
        return load_catalog(handle, schema, catalog_id=catalog_id)


def _load_tags_arg(path: str) -> TagVector:
    with open(path, "r", encoding="utf-8") as handle:
        try:
            raw = json.load(handle)
        except json.JSONDecodeError as exc:
            raise MalformedFile(f"tags file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise MalformedFile("tags file must contain a JSON object of {attribute: index}")
    return TagVector.from_dict(raw)


def _emit(args, payload, human_text: str) -> None:
    if args.json:
        print(payloads.canonical_dumps(payload))
    else:
        print(human_text)


def _cmd_validate(args) -> int:
    results = {"schema": None, "catalogs": [], "annotations": []}
    failures = 0
    try:
        schema = _load_schema_arg(args)
        results["schema"] = {"ok": True, "name": schema.name, "attributes": len(schema.attributes)}
    except TagMatchError as exc:
        results["schema"] = {"ok": False, "error": exc.payload()}
        _emit(args, results, f"schema: INVALID: {exc.message}")
        return 1
    for arg in args.catalog:
        catalog_id, path = _split_catalog_arg(arg)
        entry = {"path": path, "catalog_id": catalog_id}
        try:
            with open(path, "rb") as handle:
                catalog = load_catalog(handle, schema, catalog_id=catalog_id)
            entry.update(ok=True, assets=len(catalog))
        except TagMatchError as exc:
            entry.update(ok=False, error=exc.payload())
            failures += 1
        results["catalogs"].append(entry)
    for path in args.annotations:
        entry = {"path": path}
        try:
            with open(path, "rb") as handle:
                store = load_annotations(handle, schema)
            entry.update(ok=True, annotations=len(store), subjects=len(store.subject_ids()))
        except TagMatchError as exc:
            entry.update(ok=False, error=exc.payload())
            failures += 1
        results["annotations"].append(entry)
    lines = [f"schema: ok ({results['schema']['name']}, {results['schema']['attributes']} attributes)"]
    for entry in results["catalogs"]:
        status = f"ok ({entry['assets']} assets)" if entry["ok"] else f"INVALID: {entry['error']['message']}"
        lines.append(f"catalog {entry['path']}: {status}")
    for entry in results["annotations"]:
        status = (
            f"ok ({entry['annotations']} annotations, {entry['subjects']} subjects)"
            if entry["ok"]
            else f"INVALID: {entry['error']['message']}"
        )
        lines.append(f"annotations {entry['path']}: {status}")
    _emit(args, results, "\n".join(lines))
    return 1 if failures else 0


def _cmd_match(args) -> int:
    schema = _load_schema_arg(args)
    config = _metric_config(args)
    catalog = _load_catalog_arg(args.catalog, schema)
    query = _load_tags_arg(args.tags)
    payload = payloads.match_payload(query, catalog, args.k, schema, config)
    _emit(args, payload, payloads.matches_table(payload))
    return 0


def _cmd_rank(args) -> int:
    schema = _load_schema_arg(args)
    config = _metric_config(args)
    catalog = _load_catalog_arg(args.catalog, schema)
    query = _load_tags_arg(args.tags)
    k = args.k if args.k is not None else len(catalog)
    if args.explain:
        payload = payloads.match_payload(query, catalog, k, schema, config)["matches"]
    else:
        matches = rank_assets(query, catalog, k, schema, config)
        payload = payloads.ranked_payload(matches)
    _emit(args, payload, payloads.ranked_table(payload))
    return 0


def _cmd_retarget(args) -> int:
    schema = _load_schema_arg(args)
    config = _metric_config(args)
    catalogs = [_load_catalog_arg(arg, schema) for arg in args.catalog]
    query = _load_tags_arg(args.tags)
    result = retarget(query, catalogs, args.k, schema, config)
    payload = payloads.retarget_payload(result)
    lines = []
    for catalog_id, entries in payload.items():
        lines.append(f"== {catalog_id}")
        lines.append(payloads.ranked_table(entries))
    _emit(args, payload, "\n".join(lines))
    return 0


def _agreement_policy(args) -> AgreementPolicy:
    return AgreementPolicy(
        level=LEVELS[args.level], topk_rule=TOPK_RULES[args.topk_rule], quorum=args.quorum
    )


def _cmd_agree(args) -> int:
    schema = _load_schema_arg(args)
    config = _metric_config(args)
    catalog = _load_catalog_arg(args.catalog, schema)
    with open(args.store, "rb") as handle:
        store = load_annotations(handle, schema)
    payload = payloads.agreement_payload(store, catalog, args.k, _agreement_policy(args), schema, config)
    if args.report_dir:
        paths = report.write_agreement_report(payload, args.report_dir)
        print(f"wrote {', '.join(str(p) for p in paths)}", file=sys.stderr)
    _emit(args, payload, payloads.agreement_table(payload))
    return 0


def _cmd_aggregate(args) -> int:
    schema = _load_schema_arg(args)
    with open(args.store, "rb") as handle:
        store = load_annotations(handle, schema)
    subject_tags = human_tags_from_store(store, schema)
    if args.subject is not None:
        if args.subject not in subject_tags:
            raise TagMatchError(f"subject {args.subject!r} not in store")
        subject_tags = {args.subject: subject_tags[args.subject]}
    payload = payloads.aggregate_payload(subject_tags)
    lines = [f"{subject_id}: {json.dumps(tags, sort_keys=True)}" for subject_id, tags in payload.items()]
    _emit(args, payload, "\n".join(lines))
    return 0


def _cmd_eval(args) -> int:
    schema = _load_schema_arg(args)
    config = _metric_config(args)
    catalog = _load_catalog_arg(args.catalog, schema)
    with open(args.pred, "rb") as handle:
        predictions = load_predictions(handle, schema)
    with open(args.human, "rb") as handle:
        human_store = load_annotations(handle, schema)
    human_tags = human_tags_from_store(human_store, schema)
    summary = evaluate(predictions, human_tags, catalog, args.k, schema, config)
    payload = payloads.eval_payload(summary, catalog.catalog_id)
    if args.report_dir:
        paths = report.write_eval_report(payload, args.report_dir)
        print(f"wrote {', '.join(str(p) for p in paths)}", file=sys.stderr)
    _emit(args, payload, payloads.eval_table(payload))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    host, _, port = args.bind.rpartition(":")
    config = ServiceConfig(
        schema_path=args.schema,
        catalog_paths=dict(_split_catalog_arg(arg) for arg in args.catalog),
        store_path=args.store,
        metric_config=_metric_config(args),
        cors_origins=tuple(args.cors),
    )
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def _cmd_info(args) -> int:
    schema = _load_schema_arg(args)
    payload = {
        "name": schema.name,
        "version": schema.version,
        "attributes": [
            {"id": a.id, "cardinality": a.cardinality, "weight": str(a.weight), "kind": a.kind.value}
            for a in schema.attributes
        ],
        "permutations": permutation_count(schema),
    }
    lines = [f"{schema.name} v{schema.version}: {len(schema.attributes)} attributes, "
             f"{payload['permutations']} permutations"]
    for entry in payload["attributes"]:
        lines.append(f"  {entry['id']:<24} card={entry['cardinality']} weight={entry['weight']} {entry['kind']}")
    _emit(args, payload, "\n".join(lines))
    return 0


_COMMANDS = {
    "validate": _cmd_validate,
    "match": _cmd_match,
    "rank": _cmd_rank,
    "retarget": _cmd_retarget,
    "agree": _cmd_agree,
    "aggregate": _cmd_aggregate,
    "eval": _cmd_eval,
    "serve": _cmd_serve,
    "info": _cmd_info,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TagMatchError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
