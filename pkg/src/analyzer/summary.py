"""분석 요약 - 위반 패턴 집계, GT 준수율, 메서드별 MR 선택"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

from src.analyzer.analyser import report_key
from src.logger import get_logger
from src.miner.rules import render
from src.models import (
    Classification,
    ConstraintRule,
    GtAssessment,
    GtComparison,
    MethodMrReport,
    MrId,
    MrSelection,
    PatternSummary,
    VerdictStatus,
)
from src.numeric import canonical_real

logger = get_logger("analyzer.summary")

MOSTLY_VIOLATED_BELOW = 17.0
BALANCED_RANGE = (30.0, 70.0)


def _balanced(report: MethodMrReport) -> bool:
    lo, hi = BALANCED_RANGE
    return (
        lo <= report.pct_nonviolation <= hi and lo <= report.pct_violation <= hi
    )


def summarize(
    reports: Sequence[MethodMrReport],
    comparisons: Sequence[GtComparison] | None = None,
) -> PatternSummary:
    """보고서를 위반 패턴별로 셉니다. GT 비교가 있으면 준수율도 계산합니다."""
    mixed = [r for r in reports if r.classification == Classification.MIXED]

    gt_pairs = gt_confirmed = 0
    compliance: float | None = None
    incorrect: list[tuple[str, MrId]] = []
    if comparisons:
        positives = [c for c in comparisons if c.gt == 1]
        gt_pairs = len(positives)
        gt_confirmed = sum(
            1 for c in positives if c.assessment == GtAssessment.GT_CONFIRMED
        )
        if gt_pairs:
            compliance = canonical_real(round(100.0 * gt_confirmed / gt_pairs, 2))
        incorrect = [
            (c.method, c.mr)
            for c in comparisons
            if c.assessment != GtAssessment.GT_CONFIRMED
        ]

    summary = PatternSummary(
        always_holds=sum(
            1 for r in reports if r.classification == Classification.APPLICABLE
        ),
        never_holds=sum(
            1 for r in reports if r.classification == Classification.NOT_APPLICABLE
        ),
        mostly_violated=sum(
            1 for r in mixed if 0 < r.pct_nonviolation < MOSTLY_VIOLATED_BELOW
        ),
        balanced=sum(1 for r in mixed if _balanced(r)),
        with_invalid=sum(1 for r in reports if r.n_invalid > 0),
        gt_pairs=gt_pairs,
        gt_confirmed=gt_confirmed,
        gt_compliance=compliance,
        gt_incorrect=incorrect,
    )
    logger.info(
        "패턴 요약: 항상 성립 %d / 항상 위반 %d / 대부분 위반 %d / 균형 %d / 무효 포함 %d",
        summary.always_holds,
        summary.never_holds,
        summary.mostly_violated,
        summary.balanced,
        summary.with_invalid,
    )
    if compliance is not None:
        logger.info("GT 준수율: %.2f%% (%d/%d)", compliance, gt_confirmed, gt_pairs)
    return summary


def select_mrs(
    reports: Iterable[MethodMrReport],
    constraints: Mapping[tuple[str, MrId], Sequence[ConstraintRule]] | None = None,
) -> list[MrSelection]:
    """메서드별로 MR을 선택합니다.

    APPLICABLE은 무조건 선택, NOT_APPLICABLE은 제외, MIXED는 비위반을
    예측하는 제약이 하나라도 있으면 조건부 선택합니다.
    """
    constraints = constraints or {}
    by_method: dict[str, list[MethodMrReport]] = {}
    for report in sorted(reports, key=lambda r: report_key(r.method, r.mr)):
        by_method.setdefault(report.method, []).append(report)

    selections: list[MrSelection] = []
    for method, method_reports in by_method.items():
        applicable: list[MrId] = []
        rejected: list[MrId] = []
        constrained: dict[MrId, list[str]] = {}
        for report in method_reports:
            match report.classification:
                case Classification.APPLICABLE:
                    applicable.append(report.mr)
                case Classification.NOT_APPLICABLE:
                    rejected.append(report.mr)
                case Classification.MIXED:
                    holds = [
                        render(rule, method, report.mr)
                        for rule in constraints.get((method, report.mr), [])
                        if rule.predicted_status == VerdictStatus.NON_VIOLATION
                    ]
                    if holds:
                        constrained[report.mr] = holds
        selections.append(
            MrSelection(
                method=method,
                applicable=applicable,
                rejected=rejected,
                constrained=constrained,
            )
        )
    return selections
