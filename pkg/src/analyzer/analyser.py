"""Analyser - 판정을 (메서드, MR) 쌍별 빈도로 집계하고 적용 가능성을 분류"""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from pathlib import Path

import yaml

from src.errors import GroundTruthError
from src.logger import get_logger
from src.models import (
    Classification,
    GtAssessment,
    GtComparison,
    MethodMrReport,
    MrId,
    Verdict,
    VerdictStatus,
)

logger = get_logger("analyzer")

GroundTruth = dict[tuple[str, MrId], int]

_MR_ORDER = {mr: i for i, mr in enumerate(MrId)}


def report_key(method: str, mr: MrId) -> tuple[str, int]:
    """보고서 정렬 키: 메서드 이름, 그다음 카탈로그 순서"""
    return method, _MR_ORDER[mr]


def _percent(part: int, total: int) -> float:
    return round(100.0 * part / total, 2)


def classify(n_trials: int, n_nonviolation: int, n_violation: int) -> Classification:
    """정확한 건수로 분류합니다. 반올림된 백분율은 쓰지 않습니다."""
    if n_trials > 0 and n_nonviolation == n_trials:
        return Classification.APPLICABLE
    if n_trials > 0 and n_violation == n_trials:
        return Classification.NOT_APPLICABLE
    return Classification.MIXED


def build_report(
    method: str,
    mr: MrId,
    n_nonviolation: int,
    n_violation: int,
    n_invalid: int,
) -> MethodMrReport:
    """건수로부터 보고서 하나를 만듭니다."""
    n = n_nonviolation + n_violation + n_invalid
    if n <= 0:
        raise ValueError(f"{method} × {mr.value}: 시행이 없습니다.")
    pct_nv = _percent(n_nonviolation, n)
    pct_v = _percent(n_violation, n)
    # 세 백분율의 합이 100이 되도록 무효 비율은 나머지로 계산
    pct_i = max(0.0, round(100.0 - pct_nv - pct_v, 2)) if n_invalid else 0.0
    return MethodMrReport(
        method=method,
        mr=mr,
        n_trials=n,
        n_nonviolation=n_nonviolation,
        n_violation=n_violation,
        n_invalid=n_invalid,
        pct_nonviolation=pct_nv,
        pct_violation=pct_v,
        pct_invalid=pct_i,
        classification=classify(n, n_nonviolation, n_violation),
    )


def aggregate(verdicts: Iterable[Verdict]) -> list[MethodMrReport]:
    """판정을 (메서드, MR) 쌍별로 집계합니다.

    입력 순서와 무관하며, 결과는 메서드 이름과 카탈로그 순서로 정렬됩니다.
    """
    counts: dict[tuple[str, MrId], Counter[VerdictStatus]] = {}
    for verdict in verdicts:
        counts.setdefault((verdict.method, verdict.mr), Counter())[
            verdict.status
        ] += 1

    if not counts:
        raise ValueError("집계할 판정이 없습니다.")

    reports = [
        build_report(
            method,
            mr,
            c[VerdictStatus.NON_VIOLATION],
            c[VerdictStatus.VIOLATION],
            c[VerdictStatus.INVALID],
        )
        for (method, mr), c in counts.items()
    ]
    reports.sort(key=lambda r: report_key(r.method, r.mr))

    by_class = Counter(r.classification for r in reports)
    logger.info(
        "집계 완료: %d쌍 (적용 %d / 비적용 %d / 혼합 %d)",
        len(reports),
        by_class[Classification.APPLICABLE],
        by_class[Classification.NOT_APPLICABLE],
        by_class[Classification.MIXED],
    )
    return reports


def assess(gt: int, report: MethodMrReport) -> GtAssessment:
    """GT 라벨 하나를 판정 빈도와 대조합니다.

    gt=1이면 비위반 비율이, gt=0이면 위반 비율이 기준입니다.
    100%면 확인, 0%면 완전히 틀림, 그 사이면 부분적으로 틀림(혼합)입니다.
    """
    if gt == 1:
        hits = report.n_nonviolation
    elif gt == 0:
        hits = report.n_violation
    else:
        raise GroundTruthError(f"GT 값은 0 또는 1이어야 합니다: {gt}")

    if hits == report.n_trials:
        return GtAssessment.GT_CONFIRMED
    if hits == 0:
        return GtAssessment.GT_FULLY_INCORRECT
    return GtAssessment.GT_PARTIALLY_INCORRECT_MIXED


def compare_to_groundtruth(
    reports: Iterable[MethodMrReport], gt: Mapping[tuple[str, MrId], int]
) -> list[GtComparison]:
    """GT 라벨마다 평가를 반환합니다 (보고서 정렬 순서).

    Raises:
        GroundTruthError: GT 키에 해당하는 보고서가 없는 경우
    """
    by_key = {(r.method, r.mr): r for r in reports}
    missing = sorted(
        (k for k in gt if k not in by_key), key=lambda k: report_key(k[0], k[1])
    )
    if missing:
        names = ", ".join(f"{m} × {mr.value}" for m, mr in missing)
        raise GroundTruthError(f"GT 키에 해당하는 보고서가 없습니다: {names}")

    comparisons = [
        GtComparison(method=m, mr=mr, gt=label, assessment=assess(label, by_key[m, mr]))
        for (m, mr), label in sorted(gt.items(), key=lambda kv: report_key(*kv[0]))
    ]
    logger.info("GT 비교 완료: %d쌍", len(comparisons))
    return comparisons


def load_groundtruth(path: str | Path) -> GroundTruth:
    """GT YAML 파일을 읽습니다. 형식: ``method: {MR_ID: 0|1}``"""
    path = Path(path)
    if not path.exists():
        raise GroundTruthError(f"GT 파일이 없습니다: {path}")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as e:
        raise GroundTruthError(f"GT 파일을 파싱할 수 없습니다: {path} - {e}") from e
    if not isinstance(raw, dict):
        raise GroundTruthError(f"GT 파일 최상위는 매핑이어야 합니다: {path}")

    gt: GroundTruth = {}
    for method, labels in raw.items():
        if not isinstance(labels, dict):
            raise GroundTruthError(f"{method}: MR → 0|1 매핑이어야 합니다.")
        for mr_name, label in labels.items():
            try:
                mr = MrId(str(mr_name))
            except ValueError as e:
                raise GroundTruthError(f"{method}: 알 수 없는 MR {mr_name}") from e
            if label not in (0, 1) or isinstance(label, bool):
                raise GroundTruthError(f"{method} × {mr_name}: 값은 0 또는 1이어야 합니다.")
            gt[str(method), mr] = int(label)

    logger.info("GT 로드: %d쌍 (%s)", len(gt), path)
    return gt


def _cell(report: MethodMrReport | None) -> str:
    if report is None:
        return "-"
    cell = f"{report.pct_nonviolation:g}/{report.pct_violation:g}"
    if report.n_invalid:
        cell += f" ({report.pct_invalid:g})"
    return cell


def render_table(reports: Iterable[MethodMrReport]) -> str:
    """메서드 × MR 표를 만듭니다. 각 칸은 ✓% / ✗% (무효%)입니다."""
    reports = list(reports)
    mrs = sorted({r.mr for r in reports}, key=_MR_ORDER.__getitem__)
    methods = sorted({r.method for r in reports})
    by_key = {(r.method, r.mr): r for r in reports}

    header = ["method", *(f"{mr.value} ✓/✗" for mr in mrs)]
    rows = [[m, *(_cell(by_key.get((m, mr))) for mr in mrs)] for m in methods]

    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]
    lines = [
        "  ".join(col.ljust(w) for col, w in zip(row, widths)).rstrip()
        for row in [header, *rows]
    ]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"
