"""데이터 모델 정의 - 파이프라인 전반에서 사용되는 데이터 클래스"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from src.errors import ConfigError
from src.numeric import Number

SEED_MAX = 2**64 - 1


# ──────────────────────────────────────────────
# 테스트 데이터 생성
# ──────────────────────────────────────────────
class InputType(Enum):
    """퍼저 원소 유형"""

    INT = "int"
    FLOAT = "float"


@dataclass(frozen=True)
class CountBudget:
    """개수 기준 생성 예산 (재현 가능)"""

    n: int


@dataclass(frozen=True)
class DurationBudget:
    """시간 기준 생성 예산 (초). 머신에 따라 개수가 달라진다."""

    seconds: float


Budget = CountBudget | DurationBudget


@dataclass(frozen=True)
class FuzzConfig:
    """퍼저 설정"""

    low: Number = 1
    high: Number = 50
    input_type: InputType = InputType.INT
    budget: Budget = field(default_factory=lambda: CountBudget(1000))
    min_len: int = 2
    max_len: int = 20
    seed: int = 0

    def validate(self) -> None:
        """설정 불변식을 검사하고 위반 시 ConfigError를 발생시킵니다."""
        if self.low > self.high:
            raise ConfigError(f"low({self.low})가 high({self.high})보다 큽니다.")
        if self.min_len < 0:
            raise ConfigError(f"min_len은 0 이상이어야 합니다: {self.min_len}")
        if self.min_len > self.max_len:
            raise ConfigError(
                f"min_len({self.min_len})이 max_len({self.max_len})보다 큽니다."
            )
        if not 0 <= self.seed <= SEED_MAX:
            raise ConfigError(f"seed는 64비트 부호 없는 정수여야 합니다: {self.seed}")
        if isinstance(self.budget, CountBudget) and self.budget.n <= 0:
            raise ConfigError(f"count는 양의 정수여야 합니다: {self.budget.n}")
        if isinstance(self.budget, DurationBudget) and self.budget.seconds <= 0:
            raise ConfigError(f"duration은 양수여야 합니다: {self.budget.seconds}")
        if self.input_type == InputType.INT and not self.int_bounds():
            raise ConfigError(
                f"[{self.low}, {self.high}] 구간에 정수가 없습니다 (input_type=int)."
            )

    def int_bounds(self) -> tuple[int, int] | None:
        """정수 생성 시 실제로 사용하는 포함 구간을 반환합니다."""
        low, high = math.ceil(self.low), math.floor(self.high)
        return (low, high) if low <= high else None


@dataclass(frozen=True)
class TestDatum:
    """생성된 테스트 데이터 하나"""

    __test__ = False  # pytest 수집 대상 아님

    id: int
    values: tuple[Number, ...]


# ──────────────────────────────────────────────
# 메타모픽 관계
# ──────────────────────────────────────────────
class MrId(Enum):
    """사전 정의된 6개 MR"""

    ADD = "MR_ADD"
    MUL = "MR_MUL"
    PER = "MR_PER"
    INV = "MR_INV"
    INC = "MR_INC"
    EXC = "MR_EXC"


class Relation(Enum):
    """후속 출력과 원본 출력 사이의 기대 관계"""

    EQUAL = "equal"
    GEQ = "geq"
    LEQ = "leq"


EXPECTED_RELATIONS: dict[MrId, Relation] = {
    MrId.ADD: Relation.GEQ,
    MrId.MUL: Relation.GEQ,
    MrId.PER: Relation.EQUAL,
    MrId.INV: Relation.LEQ,
    MrId.INC: Relation.GEQ,
    MrId.EXC: Relation.LEQ,
}


@dataclass(frozen=True)
class MrSpec:
    """MR 하나 - 입력 변환 규칙과 기대 출력 관계"""

    id: MrId
    add_constant: Number = 3
    mul_factor: Number = 2
    # MR_INC가 추가하는 원소의 범위 (생성 설정의 [low, high])
    inc_low: Number = 1
    inc_high: Number = 50
    inc_type: InputType = InputType.INT

    @property
    def relation(self) -> Relation:
        return EXPECTED_RELATIONS[self.id]

    def validate(self) -> None:
        if self.add_constant <= 0:
            raise ConfigError(f"add_constant는 양수여야 합니다: {self.add_constant}")
        if self.mul_factor <= 1:
            raise ConfigError(f"mul_factor는 1보다 커야 합니다: {self.mul_factor}")
        if self.inc_low > self.inc_high:
            raise ConfigError("MR_INC 원소 범위가 비어 있습니다.")


@dataclass(frozen=True)
class TransformedDatum:
    """MR 변환을 거친 후속 테스트 데이터"""

    source_id: int
    mr: MrId
    values: tuple[Number, ...]


# 데이터 id → MR → 후속 데이터 (건너뛴 변환은 None)
TransformTable = dict[int, dict[MrId, TransformedDatum | None]]


# ──────────────────────────────────────────────
# 실행
# ──────────────────────────────────────────────
class FailureKind(Enum):
    """실행 실패 유형. TIMEOUT과 PROTOCOL_ERROR는 외부 SUT에서만 발생한다."""

    DOMAIN_ERROR = "DOMAIN_ERROR"
    ARITY_ERROR = "ARITY_ERROR"
    OVERFLOW = "OVERFLOW"
    NONFINITE = "NONFINITE"
    TIMEOUT = "TIMEOUT"
    PROTOCOL_ERROR = "PROTOCOL_ERROR"


@dataclass(frozen=True)
class ExecutionOutcome:
    """SUT 실행 결과 - Value 또는 Failure"""

    value: float | None = None
    failure: FailureKind | None = None
    message: str = ""

    @classmethod
    def ok(cls, value: float) -> ExecutionOutcome:
        return cls(value=value)

    @classmethod
    def fail(cls, kind: FailureKind, message: str = "") -> ExecutionOutcome:
        return cls(failure=kind, message=message)

    @property
    def is_failure(self) -> bool:
        return self.failure is not None


@dataclass(frozen=True)
class MethodDescriptor:
    """코퍼스 메서드 메타데이터"""

    name: str
    min_arity: int
    permutation_invariant: bool
    domain_note: str
    formula: str = ""


@dataclass(frozen=True)
class ExecutionRecord:
    """(메서드, MR, 데이터) 하나에 대한 실행 기록"""

    exec_id: int
    method: str
    mr: MrId
    source_input: tuple[Number, ...]
    followup_input: tuple[Number, ...] | None
    source_outcome: ExecutionOutcome
    followup_outcome: ExecutionOutcome | None

    @property
    def transform_skipped(self) -> bool:
        return self.followup_input is None


# ──────────────────────────────────────────────
# 판정 및 분석
# ──────────────────────────────────────────────
class VerdictStatus(Enum):
    """시행 하나의 판정"""

    NON_VIOLATION = "NON_VIOLATION"
    VIOLATION = "VIOLATION"
    INVALID = "INVALID"


@dataclass(frozen=True)
class Verdict:
    """MR-Checker 판정 결과"""

    exec_id: int
    method: str
    mr: MrId
    status: VerdictStatus
    detail: str = ""


class Classification(Enum):
    """(메서드, MR) 쌍의 적용 가능성 분류"""

    APPLICABLE = "APPLICABLE"
    NOT_APPLICABLE = "NOT_APPLICABLE"
    MIXED = "MIXED"


@dataclass(frozen=True)
class MethodMrReport:
    """(메서드, MR) 쌍의 집계 결과"""

    method: str
    mr: MrId
    n_trials: int
    n_nonviolation: int
    n_violation: int
    n_invalid: int
    pct_nonviolation: float
    pct_violation: float
    pct_invalid: float
    classification: Classification


class GtAssessment(Enum):
    """GT 라벨 평가 결과"""

    GT_CONFIRMED = "GT_CONFIRMED"
    GT_FULLY_INCORRECT = "GT_FULLY_INCORRECT"
    GT_PARTIALLY_INCORRECT_MIXED = "GT_PARTIALLY_INCORRECT_MIXED"


@dataclass(frozen=True)
class GtComparison:
    """(메서드, MR) 쌍 하나에 대한 GT 비교"""

    method: str
    mr: MrId
    gt: int
    assessment: GtAssessment


# ──────────────────────────────────────────────
# 제약 마이닝
# ──────────────────────────────────────────────
@dataclass(frozen=True)
class DataFeatures:
    """테스트 데이터 하나의 특징. 빈 리스트면 min/max/sum은 None이다."""

    length: int
    min_val: Number | None
    max_val: Number | None
    sum_val: Number | None
    has_negative: bool
    has_zero: bool
    has_duplicates: bool
    is_empty: bool
    all_positive: bool
    is_sorted: bool


@dataclass(frozen=True)
class Atom:
    """원자 술어. op는 'is', 'not' (불리언) 또는 '<', '>=' (수치 임계값)"""

    feature: str
    op: str
    threshold: Number | None = None

    @property
    def text(self) -> str:
        if self.op == "is":
            return self.feature
        if self.op == "not":
            return f"not {self.feature}"
        return f"{self.feature} {self.op} {self.threshold}"

    def holds(self, features: DataFeatures) -> bool:
        value = getattr(features, self.feature)
        match self.op:
            case "is":
                return bool(value)
            case "not":
                return not value
            case "<":
                return value is not None and value < self.threshold
            case ">=":
                return value is not None and value >= self.threshold
        raise ValueError(f"알 수 없는 연산자: {self.op}")


@dataclass(frozen=True)
class ConstraintRule:
    """술어 → 판정 형태의 MR 제약 후보. 술어는 원자 0~2개의 논리곱이다."""

    predicate: tuple[Atom, ...]
    predicted_status: VerdictStatus
    support: int
    precision: float
    recall: float

    @property
    def predicate_text(self) -> str:
        if not self.predicate:
            return "true"
        return " and ".join(atom.text for atom in self.predicate)

    @property
    def text(self) -> str:
        return f"{self.predicate_text} → {self.predicted_status.value}"

    def applies(self, features: DataFeatures) -> bool:
        return all(atom.holds(features) for atom in self.predicate)


@dataclass(frozen=True)
class PatternSummary:
    """위반 패턴별 (메서드, MR) 쌍 수와 GT 준수율"""

    always_holds: int
    never_holds: int
    mostly_violated: int
    balanced: int
    with_invalid: int
    gt_pairs: int = 0
    gt_confirmed: int = 0
    gt_compliance: float | None = None
    gt_incorrect: list[tuple[str, MrId]] = field(default_factory=list)


@dataclass(frozen=True)
class MrSelection:
    """메서드 하나에 대한 MR 선택 결과"""

    method: str
    applicable: list[MrId]
    rejected: list[MrId]
    constrained: dict[MrId, list[str]]


@dataclass
class RunManifest:
    """실행 재현에 필요한 정보. 분석 아티팩트에 포함된다."""

    tool_version: str
    fuzz: FuzzConfig
    add_constant: Number
    mul_factor: Number
    mrs: list[MrId]
    methods: list[str]
    seed: int
    tolerance: float
    external: str | None = None
    artifacts: dict[str, str] = field(default_factory=dict)
    started_at: str = ""
    finished_at: str = ""
