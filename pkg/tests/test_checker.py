"""MR-Checker 테스트"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.checker.mr_checker import DEFAULT_TOLERANCE, check, check_all, compare
from src.models import (
    ExecutionOutcome,
    ExecutionRecord,
    FailureKind,
    MrId,
    Relation,
    VerdictStatus,
)


def _record(source, followup, mr=MrId.ADD, exec_id=0):
    """원본/후속 출력으로 실행 기록 생성. 실패는 FailureKind, 건너뜀은 None"""

    def outcome(value):
        if isinstance(value, FailureKind):
            return ExecutionOutcome.fail(value)
        return ExecutionOutcome.ok(value)

    return ExecutionRecord(
        exec_id=exec_id,
        method="average",
        mr=mr,
        source_input=(1, 2),
        followup_input=None if followup is None else (4, 5),
        source_outcome=outcome(source),
        followup_outcome=None if followup is None else outcome(followup),
    )


class TestCheck:
    """check 테스트"""

    def test_geq_holds(self):
        """후속 ≥ 원본이면 비위반"""
        verdict = check(_record(1.5, 4.5), Relation.GEQ)
        assert verdict.status == VerdictStatus.NON_VIOLATION
        assert verdict.detail == ""

    def test_geq_equal_is_not_violation(self):
        """비엄격 비교: 같은 값은 GEQ를 만족"""
        verdict = check(_record(2.0, 2.0), Relation.GEQ)
        assert verdict.status == VerdictStatus.NON_VIOLATION

    def test_geq_violated(self):
        """후속 < 원본이면 위반, 관측 관계를 기록"""
        verdict = check(_record(0.5, 0.1), Relation.GEQ)
        assert verdict.status == VerdictStatus.VIOLATION
        assert verdict.detail == "후속 < 원본"

    def test_leq_violated(self):
        """LEQ 위반"""
        verdict = check(_record(1.0, 2.0), Relation.LEQ)
        assert verdict.status == VerdictStatus.VIOLATION
        assert verdict.detail == "후속 > 원본"

    def test_equal_within_tolerance(self):
        """상대 허용 오차 안의 차이는 같은 값"""
        s = 123456.789
        f = s * (1 + 0.5e-9)
        assert check(_record(s, f, MrId.PER), Relation.EQUAL).status == (
            VerdictStatus.NON_VIOLATION
        )

    def test_equal_violated(self):
        """허용 오차를 넘으면 EQUAL 위반"""
        verdict = check(_record(1.0, 1.001, MrId.PER), Relation.EQUAL)
        assert verdict.status == VerdictStatus.VIOLATION
        assert verdict.detail == "후속 > 원본"

    def test_absolute_floor_near_zero(self):
        """0 근처에서는 절대 허용 오차 tolerance"""
        assert compare(0.0, 5e-10, Relation.EQUAL, DEFAULT_TOLERANCE)
        assert not compare(0.0, 5e-9, Relation.EQUAL, DEFAULT_TOLERANCE)

    def test_source_failure_is_invalid(self):
        """원본 실패는 INVALID"""
        verdict = check(_record(FailureKind.DOMAIN_ERROR, 1.0), Relation.GEQ)
        assert verdict.status == VerdictStatus.INVALID
        assert verdict.detail == "source:DOMAIN_ERROR"

    def test_both_failures(self):
        """두 실패 모두 사유에 기록"""
        record = _record(FailureKind.ARITY_ERROR, FailureKind.NONFINITE)
        verdict = check(record, Relation.GEQ)
        assert verdict.detail == "source:ARITY_ERROR,followup:NONFINITE"

    def test_skipped_transform_is_invalid(self):
        """건너뛴 변환은 INVALID"""
        verdict = check(_record(3.0, None, MrId.EXC), Relation.LEQ)
        assert verdict.status == VerdictStatus.INVALID
        assert verdict.detail == "followup:skipped"

    def test_invalid_tolerance(self):
        """tolerance ≤ 0은 ValueError"""
        with pytest.raises(ValueError):
            check(_record(1.0, 1.0), Relation.EQUAL, tolerance=0)


class TestCheckAll:
    """check_all 테스트"""

    def test_uses_expected_relations(self):
        """관계를 주지 않으면 MR의 기대 관계 사용"""
        records = [
            _record(1.0, 2.0, MrId.ADD, 0),
            _record(1.0, 2.0, MrId.INV, 1),
            _record(1.0, 2.0, MrId.PER, 2),
        ]
        statuses = [v.status for v in check_all(records)]
        assert statuses == [
            VerdictStatus.NON_VIOLATION,
            VerdictStatus.VIOLATION,
            VerdictStatus.VIOLATION,
        ]

    def test_relation_override(self):
        """관계 표를 주면 그것을 사용"""
        records = [_record(1.0, 2.0, MrId.INV)]
        (verdict,) = check_all(records, {MrId.INV: Relation.GEQ})
        assert verdict.status == VerdictStatus.NON_VIOLATION

    def test_keeps_ids(self):
        """판정은 기록의 exec_id, method, mr을 그대로 가짐"""
        (verdict,) = check_all([_record(1.0, 2.0, MrId.MUL, 42)])
        assert verdict.exec_id == 42
        assert (verdict.method, verdict.mr) == ("average", MrId.MUL)


# 정수 값이면 |f − s| ≥ 1이 허용 오차보다 항상 크다
_outputs = st.integers(min_value=-(10**6), max_value=10**6).map(float)


class TestCompareProperties:
    """비교 관계의 성질"""

    @settings(max_examples=10_000, deadline=None)
    @given(s=_outputs, f=_outputs)
    def test_totality(self, s, f):
        """GEQ 또는 LEQ 중 하나는 항상 성립"""
        assert compare(s, f, Relation.GEQ, DEFAULT_TOLERANCE) or compare(
            s, f, Relation.LEQ, DEFAULT_TOLERANCE
        )

    @settings(max_examples=10_000, deadline=None)
    @given(s=_outputs, f=_outputs)
    def test_antisymmetry(self, s, f):
        """GEQ와 LEQ가 모두 성립하는 것은 EQUAL일 때뿐"""
        both = compare(s, f, Relation.GEQ, DEFAULT_TOLERANCE) and compare(
            s, f, Relation.LEQ, DEFAULT_TOLERANCE
        )
        assert both == compare(s, f, Relation.EQUAL, DEFAULT_TOLERANCE)

    @given(s=_outputs, f=_outputs)
    def test_geq_leq_swap(self, s, f):
        """(s, f)의 GEQ는 (f, s)의 LEQ"""
        assert compare(s, f, Relation.GEQ, DEFAULT_TOLERANCE) == compare(
            f, s, Relation.LEQ, DEFAULT_TOLERANCE
        )

    @given(
        s=_outputs,
        f=_outputs,
        relation=st.sampled_from(list(Relation)),
    )
    def test_pure(self, s, f, relation):
        """같은 기록은 항상 같은 판정"""
        record = _record(s, f)
        assert check(record, relation) == check(record, relation)
