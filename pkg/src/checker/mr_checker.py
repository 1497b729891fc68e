"""MR-Checker - 원본/후속 출력이 MR의 기대 관계를 만족하는지 판정"""

from __future__ import annotations

from src.logger import get_logger
from src.models import (
    ExecutionRecord,
    MrId,
    Relation,
    Verdict,
    VerdictStatus,
)
from src.relations.catalog import expected_relation

logger = get_logger("checker")

DEFAULT_TOLERANCE = 1e-9

_OBSERVED = {
    Relation.EQUAL: "후속 = 원본",
    Relation.GEQ: "후속 > 원본",
    Relation.LEQ: "후속 < 원본",
}


def _invalid_detail(record: ExecutionRecord) -> str | None:
    """INVALID 사유를 반환합니다. 유효한 시행이면 None."""
    reasons: list[str] = []
    if record.source_outcome.failure is not None:
        reasons.append(f"source:{record.source_outcome.failure.value}")
    if record.followup_outcome is None:
        reasons.append("followup:skipped")
    elif record.followup_outcome.failure is not None:
        reasons.append(f"followup:{record.followup_outcome.failure.value}")
    return ",".join(reasons) if reasons else None


def compare(s: float, f: float, relation: Relation, tolerance: float) -> bool:
    """두 출력이 관계를 만족하면 True. GEQ/LEQ는 비엄격 비교입니다."""
    slack = tolerance * max(1.0, abs(s), abs(f))
    match relation:
        case Relation.EQUAL:
            return abs(f - s) <= slack
        case Relation.GEQ:
            return f >= s - slack
        case Relation.LEQ:
            return f <= s + slack
    raise ValueError(f"알 수 없는 관계: {relation}")


def _observed(s: float, f: float) -> str:
    if f > s:
        return _OBSERVED[Relation.GEQ]
    if f < s:
        return _OBSERVED[Relation.LEQ]
    return _OBSERVED[Relation.EQUAL]


def check(
    record: ExecutionRecord,
    relation: Relation,
    tolerance: float = DEFAULT_TOLERANCE,
) -> Verdict:
    """실행 기록 하나를 판정합니다.

    실패 출력이나 건너뛴 변환이 있으면 INVALID, 관계를 만족하면
    NON_VIOLATION, 아니면 VIOLATION입니다.
    """
    if tolerance <= 0:
        raise ValueError(f"tolerance는 양수여야 합니다: {tolerance}")

    reason = _invalid_detail(record)
    if reason is not None:
        return Verdict(
            exec_id=record.exec_id,
            method=record.method,
            mr=record.mr,
            status=VerdictStatus.INVALID,
            detail=reason,
        )

    assert record.followup_outcome is not None
    s = record.source_outcome.value
    f = record.followup_outcome.value
    assert s is not None and f is not None

    if compare(s, f, relation, tolerance):
        status, detail = VerdictStatus.NON_VIOLATION, ""
    else:
        status, detail = VerdictStatus.VIOLATION, _observed(s, f)

    return Verdict(
        exec_id=record.exec_id,
        method=record.method,
        mr=record.mr,
        status=status,
        detail=detail,
    )


def check_all(
    records: list[ExecutionRecord],
    relations: dict[MrId, Relation] | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[Verdict]:
    """기록 전체를 판정합니다. 관계를 주지 않으면 카탈로그의 기대 관계를 씁니다."""
    verdicts = [
        check(
            record,
            relations[record.mr] if relations else expected_relation(record.mr),
            tolerance,
        )
        for record in records
    ]
    counts = {status: 0 for status in VerdictStatus}
    for verdict in verdicts:
        counts[verdict.status] += 1
    logger.info(
        "판정 완료: %d건 (비위반 %d / 위반 %d / 무효 %d)",
        len(verdicts),
        counts[VerdictStatus.NON_VIOLATION],
        counts[VerdictStatus.VIOLATION],
        counts[VerdictStatus.INVALID],
    )
    return verdicts
