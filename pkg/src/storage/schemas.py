"""아티팩트 JSON 스키마 (JSON Schema draft 2020-12)

문서마다 ``"schema": "mrtrim/<kind>/v1"`` 식별자를 포함한다.
필드 설명은 docs/artifacts.md 참고.
"""

from __future__ import annotations

from typing import Any

SCHEMA_PREFIX = "mrtrim"
SCHEMA_VERSION = "v1"

MR_IDS = ["MR_ADD", "MR_MUL", "MR_PER", "MR_INV", "MR_INC", "MR_EXC"]
FAILURE_KINDS = [
    "DOMAIN_ERROR",
    "ARITY_ERROR",
    "OVERFLOW",
    "NONFINITE",
    "TIMEOUT",
    "PROTOCOL_ERROR",
]
STATUSES = ["NON_VIOLATION", "VIOLATION", "INVALID"]
CLASSIFICATIONS = ["APPLICABLE", "NOT_APPLICABLE", "MIXED"]
ASSESSMENTS = [
    "GT_CONFIRMED",
    "GT_FULLY_INCORRECT",
    "GT_PARTIALLY_INCORRECT_MIXED",
]

_number = {"type": "number"}
_count = {"type": "integer", "minimum": 0}
_percent = {"type": "number", "minimum": 0, "maximum": 100}
_ratio = {"type": "number", "minimum": 0, "maximum": 1}
_positive = {"type": "number", "exclusiveMinimum": 0}
_values = {"type": "array", "items": _number}
_mr = {"enum": MR_IDS}


def _object(required: dict[str, Any], optional: dict[str, Any] | None = None) -> dict:
    return {
        "type": "object",
        "properties": {**required, **(optional or {})},
        "required": sorted(required),
        "additionalProperties": False,
    }


def _document(kind: str, body: dict[str, Any]) -> dict[str, Any]:
    schema = _object({"schema": {"const": schema_id(kind)}, **body})
    schema["$schema"] = "https://json-schema.org/draft/2020-12/schema"
    return schema


def schema_id(kind: str) -> str:
    return f"{SCHEMA_PREFIX}/{kind}/{SCHEMA_VERSION}"


FUZZ_CONFIG = _object(
    {
        "low": _number,
        "high": _number,
        "input_type": {"enum": ["int", "float"]},
        "budget": {
            "oneOf": [
                _object({"count": {"type": "integer", "minimum": 1}}),
                _object({"duration": {"type": "number", "exclusiveMinimum": 0}}),
            ]
        },
        "min_len": _count,
        "max_len": _count,
        "seed": _count,
    }
)

MR_SPEC = _object(
    {
        "id": _mr,
        "add_constant": _number,
        "mul_factor": _number,
        "inc_low": _number,
        "inc_high": _number,
        "inc_type": {"enum": ["int", "float"]},
    }
)

OUTCOME = {
    "oneOf": [
        _object({"value": _number}),
        _object({"failure": {"enum": FAILURE_KINDS}, "message": {"type": "string"}}),
    ]
}

VERDICT = _object(
    {"status": {"enum": STATUSES}, "detail": {"type": "string"}},
)

RECORD = _object(
    {
        "exec_id": _count,
        "mr": _mr,
        "source_input": _values,
        "followup_input": {"oneOf": [_values, {"type": "null"}]},
        "source_outcome": OUTCOME,
        "followup_outcome": {"oneOf": [OUTCOME, {"type": "null"}]},
    },
    {"verdict": VERDICT},
)

REPORT = _object(
    {
        "n_trials": {"type": "integer", "minimum": 1},
        "n_nonviolation": _count,
        "n_violation": _count,
        "n_invalid": _count,
        "pct_nonviolation": _percent,
        "pct_violation": _percent,
        "pct_invalid": _percent,
        "classification": {"enum": CLASSIFICATIONS},
    },
    {"gt": {"enum": [0, 1]}, "gt_assessment": {"enum": ASSESSMENTS}},
)

ATOM = _object(
    {"feature": {"type": "string"}, "op": {"enum": ["is", "not", "<", ">="]}},
    {"threshold": _number},
)

RULE = _object(
    {
        "predicate": {"type": "array", "items": ATOM, "maxItems": 2},
        "predicted_status": {"enum": STATUSES},
        "support": {"type": "integer", "minimum": 1},
        "precision": _ratio,
        "recall": _ratio,
        "text": {"type": "string"},
    }
)

_pair = {"type": "array", "prefixItems": [{"type": "string"}, _mr], "items": False}

SUMMARY = _object(
    {
        "always_holds": _count,
        "never_holds": _count,
        "mostly_violated": _count,
        "balanced": _count,
        "with_invalid": _count,
        "gt_pairs": _count,
        "gt_confirmed": _count,
        "gt_compliance": {"oneOf": [_percent, {"type": "null"}]},
        "gt_incorrect": {"type": "array", "items": _pair},
    }
)

SELECTION = _object(
    {
        "applicable": {"type": "array", "items": _mr},
        "rejected": {"type": "array", "items": _mr},
        "constrained": {
            "type": "object",
            "propertyNames": _mr,
            "additionalProperties": {"type": "array", "items": {"type": "string"}},
        },
    }
)

MANIFEST = _object(
    {
        "tool_version": {"type": "string"},
        "fuzz": FUZZ_CONFIG,
        "add_constant": _number,
        "mul_factor": _number,
        "mrs": {"type": "array", "items": _mr},
        "methods": {"type": "array", "items": {"type": "string"}},
        "seed": _count,
        "tolerance": _positive,
        "external": {"oneOf": [{"type": "string"}, {"type": "null"}]},
        "artifacts": {"type": "object", "additionalProperties": {"type": "string"}},
        "started_at": {"type": "string"},
        "finished_at": {"type": "string"},
    }
)


def _by_method_mr(item: dict[str, Any]) -> dict[str, Any]:
    return {
        "type": "object",
        "additionalProperties": {
            "type": "object",
            "propertyNames": _mr,
            "additionalProperties": item,
        },
    }


TD = _document(
    "td",
    {
        "config": FUZZ_CONFIG,
        "data": {
            "type": "array",
            "items": _object({"id": _count, "td": _values}),
        },
    },
)

TRANSFORMED = _document(
    "transformed",
    {
        "seed": _count,
        "mrs": {"type": "array", "items": MR_SPEC},
        "data": {
            "type": "array",
            "items": _object(
                {"id": _count, "td": _values},
                {mr: {"oneOf": [_values, {"type": "null"}]} for mr in MR_IDS},
            ),
        },
    },
)

EXECUTION = _document(
    "execution",
    {
        "method": {"type": "string", "minLength": 1},
        "external": {"oneOf": [{"type": "string"}, {"type": "null"}]},
        "records": {"type": "array", "items": RECORD},
        "tolerance": {"oneOf": [_positive, {"type": "null"}]},
    },
)

ANALYSIS = _document(
    "analysis",
    {
        "manifest": MANIFEST,
        "reports": _by_method_mr(REPORT),
        "constraints": _by_method_mr({"type": "array", "items": RULE}),
        "summary": SUMMARY,
        "selection": {"type": "object", "additionalProperties": SELECTION},
    },
)

SCHEMAS: dict[str, dict[str, Any]] = {
    "td": TD,
    "transformed": TRANSFORMED,
    "execution": EXECUTION,
    "analysis": ANALYSIS,
}
