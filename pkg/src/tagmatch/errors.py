"""Exception types shared across the engine.

Every domain error derives from TagMatchError and carries a stable ``code``
(snake_case, used verbatim in CLI/service error payloads) plus a ``detail``
dict with machine-readable context.
"""

from __future__ import annotations

from typing import Any


class TagMatchError(Exception):
    """Base class for all domain errors."""

    code = "error"

    def __init__(self, message: str, **detail: Any):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def payload(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "detail": self.detail}


class MalformedFile(TagMatchError):
    code = "malformed_file"


class InvalidSchema(TagMatchError):
    code = "invalid_schema"


class MalformedLine(TagMatchError):
    code = "malformed_line"

    def __init__(self, line_no: int, message: str, **detail: Any):
        super().__init__(f"line {line_no}: {message}", line=line_no, **detail)
        self.line_no = line_no


class DuplicateAssetId(TagMatchError):
    code = "duplicate_asset_id"


class InvalidTags(TagMatchError):
    code = "invalid_tags"


class IndexOutOfRange(TagMatchError):
    code = "index_out_of_range"


class SchemaMismatch(TagMatchError):
    code = "schema_mismatch"


class EmptyCatalog(TagMatchError):
    code = "empty_catalog"


class EmptyInput(TagMatchError):
    code = "empty_input"


class TooFewValues(TagMatchError):
    code = "too_few_values"


class NoEligibleSubjects(TagMatchError):
    code = "no_eligible_subjects"


class MissingTarget(TagMatchError):
    code = "missing_target"


class UnknownAsset(TagMatchError):
    code = "unknown_asset"


class UnknownCatalog(TagMatchError):
    code = "unknown_catalog"
