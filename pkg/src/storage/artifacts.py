"""파이프라인 아티팩트 읽기/쓰기 - 정규화된 JSON + 스키마 검증

직렬화 규칙:
- 키는 사전순 정렬, 공백 없는 한 줄, 마지막에 개행
- 정수는 그대로, 실수는 유효숫자 9자리 (1e9 미만은 지수 없이)
- 같은 페이로드는 바이트 단위로 같은 파일이 된다
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from src.errors import MetaTrimmerError, SchemaError, SchemaVersionError
from src.logger import get_logger
from src.miner.rules import render
from src.models import (
    Atom,
    Classification,
    ConstraintRule,
    CountBudget,
    DurationBudget,
    ExecutionOutcome,
    ExecutionRecord,
    FailureKind,
    FuzzConfig,
    GtAssessment,
    GtComparison,
    InputType,
    MethodMrReport,
    MrId,
    MrSelection,
    MrSpec,
    PatternSummary,
    RunManifest,
    TestDatum,
    TransformedDatum,
    TransformTable,
    Verdict,
    VerdictStatus,
)
from src.numeric import format_number
from src.storage.schemas import SCHEMA_PREFIX, SCHEMAS, schema_id

logger = get_logger("storage")

_MR_ORDER = {mr: i for i, mr in enumerate(MrId)}


class ArtifactKind(Enum):
    """파이프라인 아티팩트 종류"""

    TD = "td"
    TRANSFORMED = "transformed"
    EXECUTION = "execution"
    ANALYSIS = "analysis"

    @property
    def schema_id(self) -> str:
        return schema_id(self.value)


# ──────────────────────────────────────────────
# 페이로드
# ──────────────────────────────────────────────
@dataclass
class TdArtifact:
    """(a) 생성된 테스트 데이터"""

    config: FuzzConfig
    data: list[TestDatum]


@dataclass
class TransformedArtifact:
    """(b) 원본 데이터와 MR별 후속 데이터"""

    seed: int
    specs: list[MrSpec]
    data: list[TestDatum]
    table: TransformTable


@dataclass
class ExecutionArtifact:
    """(c)/(d) 메서드 하나의 실행 기록. 판정 후에는 verdicts가 채워진다."""

    method: str
    records: list[ExecutionRecord]
    verdicts: list[Verdict] | None = None
    external: str | None = None
    tolerance: float | None = None


@dataclass
class AnalysisArtifact:
    """(e) 집계, GT 비교, 제약, 요약"""

    manifest: RunManifest
    reports: list[MethodMrReport]
    comparisons: list[GtComparison] = field(default_factory=list)
    constraints: dict[tuple[str, MrId], list[ConstraintRule]] = field(
        default_factory=dict
    )
    summary: PatternSummary = field(
        default_factory=lambda: PatternSummary(0, 0, 0, 0, 0)
    )
    selections: list[MrSelection] = field(default_factory=list)


Payload = TdArtifact | TransformedArtifact | ExecutionArtifact | AnalysisArtifact


# ──────────────────────────────────────────────
# 정규 직렬화
# ──────────────────────────────────────────────
def canonical_dumps(obj: Any) -> str:
    """JSON 호환 객체를 정규 문자열로 직렬화합니다 (개행 포함)."""
    return _encode(obj) + "\n"


def _encode(obj: Any) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return format_number(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        body = ",".join(f"{_encode(k)}:{_encode(v)}" for k, v in items)
        return "{" + body + "}"
    raise TypeError(f"직렬화할 수 없는 타입: {type(obj).__name__}")


# ──────────────────────────────────────────────
# 인코딩 (도메인 → JSON 호환 dict)
# ──────────────────────────────────────────────
def _fuzz_to_dict(config: FuzzConfig) -> dict[str, Any]:
    budget = config.budget
    return {
        "low": config.low,
        "high": config.high,
        "input_type": config.input_type.value,
        "budget": (
            {"count": budget.n}
            if isinstance(budget, CountBudget)
            else {"duration": budget.seconds}
        ),
        "min_len": config.min_len,
        "max_len": config.max_len,
        "seed": config.seed,
    }


def _spec_to_dict(spec: MrSpec) -> dict[str, Any]:
    return {
        "id": spec.id.value,
        "add_constant": spec.add_constant,
        "mul_factor": spec.mul_factor,
        "inc_low": spec.inc_low,
        "inc_high": spec.inc_high,
        "inc_type": spec.inc_type.value,
    }


def _outcome_to_dict(outcome: ExecutionOutcome) -> dict[str, Any]:
    if outcome.failure is not None:
        return {"failure": outcome.failure.value, "message": outcome.message}
    return {"value": outcome.value}


def _rule_to_dict(rule: ConstraintRule, method: str, mr: MrId) -> dict[str, Any]:
    predicate = []
    for atom in rule.predicate:
        item: dict[str, Any] = {"feature": atom.feature, "op": atom.op}
        if atom.threshold is not None:
            item["threshold"] = atom.threshold
        predicate.append(item)
    return {
        "predicate": predicate,
        "predicted_status": rule.predicted_status.value,
        "support": rule.support,
        "precision": rule.precision,
        "recall": rule.recall,
        "text": render(rule, method, mr),
    }


def _manifest_to_dict(manifest: RunManifest) -> dict[str, Any]:
    return {
        "tool_version": manifest.tool_version,
        "fuzz": _fuzz_to_dict(manifest.fuzz),
        "add_constant": manifest.add_constant,
        "mul_factor": manifest.mul_factor,
        "mrs": [mr.value for mr in manifest.mrs],
        "methods": list(manifest.methods),
        "seed": manifest.seed,
        "tolerance": manifest.tolerance,
        "external": manifest.external,
        "artifacts": dict(manifest.artifacts),
        "started_at": manifest.started_at,
        "finished_at": manifest.finished_at,
    }


def _summary_to_dict(summary: PatternSummary) -> dict[str, Any]:
    return {
        "always_holds": summary.always_holds,
        "never_holds": summary.never_holds,
        "mostly_violated": summary.mostly_violated,
        "balanced": summary.balanced,
        "with_invalid": summary.with_invalid,
        "gt_pairs": summary.gt_pairs,
        "gt_confirmed": summary.gt_confirmed,
        "gt_compliance": summary.gt_compliance,
        "gt_incorrect": [[m, mr.value] for m, mr in summary.gt_incorrect],
    }


def encode(kind: ArtifactKind, payload: Payload) -> dict[str, Any]:
    """페이로드를 스키마 형태의 dict로 변환합니다."""
    doc: dict[str, Any] = {"schema": kind.schema_id}

    match kind:
        case ArtifactKind.TD:
            assert isinstance(payload, TdArtifact)
            doc["config"] = _fuzz_to_dict(payload.config)
            doc["data"] = [{"id": d.id, "td": list(d.values)} for d in payload.data]

        case ArtifactKind.TRANSFORMED:
            assert isinstance(payload, TransformedArtifact)
            doc["seed"] = payload.seed
            doc["mrs"] = [_spec_to_dict(s) for s in payload.specs]
            rows = []
            for datum in payload.data:
                row: dict[str, Any] = {"id": datum.id, "td": list(datum.values)}
                for mr, followup in payload.table[datum.id].items():
                    row[mr.value] = None if followup is None else list(followup.values)
                rows.append(row)
            doc["data"] = rows

        case ArtifactKind.EXECUTION:
            assert isinstance(payload, ExecutionArtifact)
            verdicts = {v.exec_id: v for v in payload.verdicts or []}
            records = []
            for r in payload.records:
                item: dict[str, Any] = {
                    "exec_id": r.exec_id,
                    "mr": r.mr.value,
                    "source_input": list(r.source_input),
                    "followup_input": (
                        None if r.followup_input is None else list(r.followup_input)
                    ),
                    "source_outcome": _outcome_to_dict(r.source_outcome),
                    "followup_outcome": (
                        None
                        if r.followup_outcome is None
                        else _outcome_to_dict(r.followup_outcome)
                    ),
                }
                if r.exec_id in verdicts:
                    v = verdicts[r.exec_id]
                    item["verdict"] = {"status": v.status.value, "detail": v.detail}
                records.append(item)
            doc["method"] = payload.method
            doc["external"] = payload.external
            doc["records"] = records
            doc["tolerance"] = payload.tolerance

        case ArtifactKind.ANALYSIS:
            assert isinstance(payload, AnalysisArtifact)
            gt = {(c.method, c.mr): c for c in payload.comparisons}
            reports: dict[str, dict[str, Any]] = {}
            for r in payload.reports:
                entry: dict[str, Any] = {
                    "n_trials": r.n_trials,
                    "n_nonviolation": r.n_nonviolation,
                    "n_violation": r.n_violation,
                    "n_invalid": r.n_invalid,
                    "pct_nonviolation": r.pct_nonviolation,
                    "pct_violation": r.pct_violation,
                    "pct_invalid": r.pct_invalid,
                    "classification": r.classification.value,
                }
                if (r.method, r.mr) in gt:
                    entry["gt"] = gt[r.method, r.mr].gt
                    entry["gt_assessment"] = gt[r.method, r.mr].assessment.value
                reports.setdefault(r.method, {})[r.mr.value] = entry

            constraints: dict[str, dict[str, Any]] = {}
            for (method, mr), rules in payload.constraints.items():
                constraints.setdefault(method, {})[mr.value] = [
                    _rule_to_dict(rule, method, mr) for rule in rules
                ]

            doc["manifest"] = _manifest_to_dict(payload.manifest)
            doc["reports"] = reports
            doc["constraints"] = constraints
            doc["summary"] = _summary_to_dict(payload.summary)
            doc["selection"] = {
                s.method: {
                    "applicable": [mr.value for mr in s.applicable],
                    "rejected": [mr.value for mr in s.rejected],
                    "constrained": {
                        mr.value: list(texts) for mr, texts in s.constrained.items()
                    },
                }
                for s in payload.selections
            }

    return doc


# ──────────────────────────────────────────────
# 디코딩 (검증된 dict → 도메인)
# ──────────────────────────────────────────────
def _fuzz_from_dict(raw: dict[str, Any]) -> FuzzConfig:
    budget_raw = raw["budget"]
    budget = (
        CountBudget(budget_raw["count"])
        if "count" in budget_raw
        else DurationBudget(budget_raw["duration"])
    )
    return FuzzConfig(
        low=raw["low"],
        high=raw["high"],
        input_type=InputType(raw["input_type"]),
        budget=budget,
        min_len=raw["min_len"],
        max_len=raw["max_len"],
        seed=raw["seed"],
    )


def _spec_from_dict(raw: dict[str, Any]) -> MrSpec:
    return MrSpec(
        id=MrId(raw["id"]),
        add_constant=raw["add_constant"],
        mul_factor=raw["mul_factor"],
        inc_low=raw["inc_low"],
        inc_high=raw["inc_high"],
        inc_type=InputType(raw["inc_type"]),
    )


def _outcome_from_dict(raw: dict[str, Any]) -> ExecutionOutcome:
    if "failure" in raw:
        return ExecutionOutcome.fail(FailureKind(raw["failure"]), raw["message"])
    return ExecutionOutcome.ok(raw["value"])


def _rule_from_dict(raw: dict[str, Any]) -> ConstraintRule:
    return ConstraintRule(
        predicate=tuple(
            Atom(a["feature"], a["op"], a.get("threshold")) for a in raw["predicate"]
        ),
        predicted_status=VerdictStatus(raw["predicted_status"]),
        support=raw["support"],
        precision=raw["precision"],
        recall=raw["recall"],
    )


def _manifest_from_dict(raw: dict[str, Any]) -> RunManifest:
    return RunManifest(
        tool_version=raw["tool_version"],
        fuzz=_fuzz_from_dict(raw["fuzz"]),
        add_constant=raw["add_constant"],
        mul_factor=raw["mul_factor"],
        mrs=[MrId(m) for m in raw["mrs"]],
        methods=list(raw["methods"]),
        seed=raw["seed"],
        tolerance=raw["tolerance"],
        external=raw["external"],
        artifacts=dict(raw["artifacts"]),
        started_at=raw["started_at"],
        finished_at=raw["finished_at"],
    )


def _by_report_key(method: str, mr: str) -> tuple[str, int]:
    return method, _MR_ORDER[MrId(mr)]


def _flatten(nested: dict[str, dict[str, Any]]) -> list[tuple[str, str, Any]]:
    items = [(m, mr, v) for m, by_mr in nested.items() for mr, v in by_mr.items()]
    return sorted(items, key=lambda t: _by_report_key(t[0], t[1]))


def decode(kind: ArtifactKind, doc: dict[str, Any]) -> Payload:
    """스키마 검증을 통과한 dict를 페이로드로 변환합니다."""
    match kind:
        case ArtifactKind.TD:
            return TdArtifact(
                config=_fuzz_from_dict(doc["config"]),
                data=[TestDatum(d["id"], tuple(d["td"])) for d in doc["data"]],
            )

        case ArtifactKind.TRANSFORMED:
            specs = [_spec_from_dict(s) for s in doc["mrs"]]
            data: list[TestDatum] = []
            table: TransformTable = {}
            for row in doc["data"]:
                datum = TestDatum(row["id"], tuple(row["td"]))
                data.append(datum)
                table[datum.id] = {}
                for spec in specs:
                    if spec.id.value not in row:
                        raise SchemaError(
                            f"{spec.id.value} 변환이 없습니다.",
                            f"$.data[{len(data) - 1}]",
                        )
                    values = row[spec.id.value]
                    table[datum.id][spec.id] = (
                        None
                        if values is None
                        else TransformedDatum(datum.id, spec.id, tuple(values))
                    )
            return TransformedArtifact(doc["seed"], specs, data, table)

        case ArtifactKind.EXECUTION:
            method = doc["method"]
            records: list[ExecutionRecord] = []
            verdicts: list[Verdict] = []
            for r in doc["records"]:
                mr = MrId(r["mr"])
                records.append(
                    ExecutionRecord(
                        exec_id=r["exec_id"],
                        method=method,
                        mr=mr,
                        source_input=tuple(r["source_input"]),
                        followup_input=(
                            None
                            if r["followup_input"] is None
                            else tuple(r["followup_input"])
                        ),
                        source_outcome=_outcome_from_dict(r["source_outcome"]),
                        followup_outcome=(
                            None
                            if r["followup_outcome"] is None
                            else _outcome_from_dict(r["followup_outcome"])
                        ),
                    )
                )
                if "verdict" in r:
                    verdicts.append(
                        Verdict(
                            exec_id=r["exec_id"],
                            method=method,
                            mr=mr,
                            status=VerdictStatus(r["verdict"]["status"]),
                            detail=r["verdict"]["detail"],
                        )
                    )
            if verdicts and len(verdicts) != len(records):
                raise SchemaError("일부 기록에만 판정이 있습니다.", "$.records")
            return ExecutionArtifact(
                method=method,
                records=records,
                verdicts=verdicts or None,
                external=doc["external"],
                tolerance=doc["tolerance"],
            )

        case ArtifactKind.ANALYSIS:
            reports: list[MethodMrReport] = []
            comparisons: list[GtComparison] = []
            for method, mr_name, r in _flatten(doc["reports"]):
                mr = MrId(mr_name)
                reports.append(
                    MethodMrReport(
                        method=method,
                        mr=mr,
                        n_trials=r["n_trials"],
                        n_nonviolation=r["n_nonviolation"],
                        n_violation=r["n_violation"],
                        n_invalid=r["n_invalid"],
                        pct_nonviolation=r["pct_nonviolation"],
                        pct_violation=r["pct_violation"],
                        pct_invalid=r["pct_invalid"],
                        classification=Classification(r["classification"]),
                    )
                )
                if "gt" in r:
                    comparisons.append(
                        GtComparison(
                            method, mr, r["gt"], GtAssessment(r["gt_assessment"])
                        )
                    )

            constraints = {
                (method, MrId(mr_name)): [_rule_from_dict(x) for x in rules]
                for method, mr_name, rules in _flatten(doc["constraints"])
            }

            s = doc["summary"]
            summary = PatternSummary(
                always_holds=s["always_holds"],
                never_holds=s["never_holds"],
                mostly_violated=s["mostly_violated"],
                balanced=s["balanced"],
                with_invalid=s["with_invalid"],
                gt_pairs=s["gt_pairs"],
                gt_confirmed=s["gt_confirmed"],
                gt_compliance=s["gt_compliance"],
                gt_incorrect=[(m, MrId(mr)) for m, mr in s["gt_incorrect"]],
            )

            selections = [
                MrSelection(
                    method=method,
                    applicable=[MrId(m) for m in sel["applicable"]],
                    rejected=[MrId(m) for m in sel["rejected"]],
                    constrained={
                        MrId(m): list(texts) for m, texts in sel["constrained"].items()
                    },
                )
                for method, sel in sorted(doc["selection"].items())
            ]

            return AnalysisArtifact(
                manifest=_manifest_from_dict(doc["manifest"]),
                reports=reports,
                comparisons=comparisons,
                constraints=constraints,
                summary=summary,
                selections=selections,
            )

    raise ValueError(f"알 수 없는 아티팩트 종류: {kind}")


# ──────────────────────────────────────────────
# 검증 / 파일 입출력
# ──────────────────────────────────────────────
def validate(kind: ArtifactKind, doc: Any) -> None:
    """문서의 스키마 식별자와 구조를 검증합니다.

    Raises:
        SchemaVersionError: 같은 종류의 알 수 없는 버전
        SchemaError: 다른 종류이거나 스키마 위반 (위치는 JSON 경로로 표시)
    """
    if not isinstance(doc, dict) or not isinstance(doc.get("schema"), str):
        raise SchemaError("schema 식별자가 없습니다.", "$.schema")

    declared = doc["schema"]
    if declared != kind.schema_id:
        if declared.startswith(f"{SCHEMA_PREFIX}/{kind.value}/"):
            raise SchemaVersionError(
                f"지원하지 않는 스키마 버전: {declared} (지원: {kind.schema_id})",
                "$.schema",
            )
        raise SchemaError(
            f"아티팩트 종류가 다릅니다: {declared} (기대: {kind.schema_id})",
            "$.schema",
        )

    error = best_match(Draft202012Validator(SCHEMAS[kind.value]).iter_errors(doc))
    if error is not None:
        raise SchemaError(f"스키마 위반: {error.message}", error.json_path)


def dumps(kind: ArtifactKind, payload: Payload) -> str:
    """페이로드를 검증 후 정규 문자열로 직렬화합니다."""
    doc = encode(kind, payload)
    validate(kind, doc)
    return canonical_dumps(doc)


def loads(kind: ArtifactKind, text: str) -> Payload:
    """정규 문자열을 읽어 검증된 페이로드를 반환합니다."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(
            f"JSON 파싱 실패: {e.msg}", f"line {e.lineno} column {e.colno}"
        ) from e
    validate(kind, doc)
    try:
        return decode(kind, doc)
    except MetaTrimmerError:
        raise
    except (KeyError, ValueError, TypeError) as e:
        raise SchemaError(f"아티팩트를 해석할 수 없습니다: {e}") from e


def write(kind: ArtifactKind, payload: Payload, path: str | Path) -> Path:
    """아티팩트를 파일로 씁니다. 상위 디렉토리는 자동으로 만듭니다."""
    path = Path(path)
    text = dumps(kind, payload)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("아티팩트 저장: %s (%s)", path, kind.schema_id)
    return path


def read(kind: ArtifactKind, path: str | Path) -> Payload:
    """아티팩트 파일을 읽습니다. 실패하면 부분 결과 없이 SchemaError를 냅니다."""
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"아티팩트 파일이 없습니다: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise SchemaError(f"아티팩트를 읽을 수 없습니다: {path} - {e}") from e
    payload = loads(kind, text)
    logger.debug("아티팩트 로드: %s (%s)", path, kind.schema_id)
    return payload
