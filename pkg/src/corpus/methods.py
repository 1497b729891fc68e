"""테스트 대상 메서드 코퍼스 - 수치 리스트를 받는 25개 기술 통계 함수

각 함수는 입력이 정의역을 벗어나면 _Failure를 발생시키고, evaluate()가
이를 ExecutionOutcome 실패로 바꾼다. 합계류 계산은 math.fsum을 사용하므로
같은 다중집합이면 순서와 무관하게 비트 단위로 같은 값을 낸다.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from src.errors import MethodLookupError
from src.models import ExecutionOutcome, FailureKind, MethodDescriptor
from src.numeric import Number, canonical_real

Evaluator = Callable[[list[float]], float]


class _Failure(Exception):
    """정의역 위반"""

    def __init__(self, kind: FailureKind, message: str) -> None:
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class _Entry:
    descriptor: MethodDescriptor
    func: Evaluator


_REGISTRY: dict[str, _Entry] = {}


def register(
    name: str,
    min_arity: int,
    permutation_invariant: bool,
    domain_note: str,
    formula: str,
) -> Callable[[Evaluator], Evaluator]:
    """코퍼스에 메서드를 등록하는 데코레이터"""

    def decorator(func: Evaluator) -> Evaluator:
        if name in _REGISTRY:
            raise ValueError(f"중복된 메서드 이름: {name}")
        descriptor = MethodDescriptor(
            name, min_arity, permutation_invariant, domain_note, formula
        )
        _REGISTRY[name] = _Entry(descriptor, func)
        return func

    return decorator


def _domain(message: str) -> _Failure:
    return _Failure(FailureKind.DOMAIN_ERROR, message)


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def _deviations(xs: Sequence[float]) -> list[float]:
    m = _mean(xs)
    return [x - m for x in xs]


def _sample_variance(xs: Sequence[float]) -> float:
    return math.fsum(d * d for d in _deviations(xs)) / (len(xs) - 1)


# ──────────────────────────────────────────────
# 합계 / 평균
# ──────────────────────────────────────────────
@register("add_values", 0, True, "제약 없음 (빈 리스트는 0)", "Σxᵢ")
def add_values(xs: list[float]) -> float:
    return math.fsum(xs)


@register("average", 1, True, "원소 1개 이상", "Σxᵢ / n")
def average(xs: list[float]) -> float:
    return _mean(xs)


@register(
    "geometric_mean", 1, True, "모든 원소가 0보다 커야 함", "exp(Σ ln xᵢ / n)"
)
def geometric_mean(xs: list[float]) -> float:
    if any(x <= 0 for x in xs):
        raise _domain("0 이하의 원소가 있습니다.")
    return math.exp(math.fsum(math.log(x) for x in xs) / len(xs))


@register(
    "harmonic_mean",
    1,
    True,
    "0인 원소가 없어야 하고 Σ1/xᵢ ≠ 0",
    "n / Σ(1/xᵢ)",
)
def harmonic_mean(xs: list[float]) -> float:
    if any(x == 0 for x in xs):
        raise _domain("0인 원소가 있습니다.")
    reciprocal_sum = math.fsum(1.0 / x for x in xs)
    if reciprocal_sum == 0:
        raise _domain("역수의 합이 0입니다.")
    return len(xs) / reciprocal_sum


@register(
    "weightedMeanEqualWeights", 1, True, "원소 1개 이상", "Σ(wᵢxᵢ) / Σwᵢ, wᵢ = 1"
)
def weighted_mean_equal_weights(xs: list[float]) -> float:
    weights = [1.0] * len(xs)
    return math.fsum(w * x for w, x in zip(weights, xs)) / math.fsum(weights)


@register(
    "trimmedMean10",
    1,
    True,
    "원소 1개 이상",
    "정렬 후 양끝에서 ⌊0.1n⌋개씩 제외한 평균",
)
def trimmed_mean_10(xs: list[float]) -> float:
    k = math.floor(0.1 * len(xs))
    kept = sorted(xs)[k : len(xs) - k]
    return _mean(kept)


@register("rootMeanSquare", 1, True, "원소 1개 이상", "√(Σxᵢ² / n)")
def root_mean_square(xs: list[float]) -> float:
    return math.sqrt(math.fsum(x * x for x in xs) / len(xs))


@register("midrange", 1, True, "원소 1개 이상", "(min + max) / 2")
def midrange(xs: list[float]) -> float:
    return (min(xs) + max(xs)) / 2


@register("median", 1, True, "원소 1개 이상", "정렬 후 가운데 값 (짝수면 두 값의 평균)")
def median(xs: list[float]) -> float:
    ordered = sorted(xs)
    mid = len(ordered) // 2
    if len(ordered) % 2:
        return ordered[mid]
    return (ordered[mid - 1] + ordered[mid]) / 2


# ──────────────────────────────────────────────
# 산포
# ──────────────────────────────────────────────
@register("sampleVariance", 2, True, "원소 2개 이상", "Σ(xᵢ − x̄)² / (n − 1)")
def sample_variance(xs: list[float]) -> float:
    return _sample_variance(xs)


@register("populationVariance", 1, True, "원소 1개 이상", "Σ(xᵢ − x̄)² / n")
def population_variance(xs: list[float]) -> float:
    return math.fsum(d * d for d in _deviations(xs)) / len(xs)


@register("standardDeviation", 2, True, "원소 2개 이상", "√(Σ(xᵢ − x̄)² / (n − 1))")
def standard_deviation(xs: list[float]) -> float:
    return math.sqrt(_sample_variance(xs))


@register("meanDeviation", 1, True, "원소 1개 이상", "Σ|xᵢ − x̄| / n")
def mean_deviation(xs: list[float]) -> float:
    return math.fsum(abs(d) for d in _deviations(xs)) / len(xs)


@register("range_value", 1, True, "원소 1개 이상", "max − min")
def range_value(xs: list[float]) -> float:
    return max(xs) - min(xs)


@register(
    "coefficientOfVariation",
    2,
    True,
    "원소 2개 이상, 평균 ≠ 0",
    "s / x̄ (s는 표본 표준편차)",
)
def coefficient_of_variation(xs: list[float]) -> float:
    m = _mean(xs)
    if m == 0:
        raise _domain("평균이 0입니다.")
    return math.sqrt(_sample_variance(xs)) / m


# ──────────────────────────────────────────────
# 분포 형태
# ──────────────────────────────────────────────
@register(
    "skewness",
    3,
    True,
    "원소 3개 이상, 분산 ≠ 0",
    "√(n(n−1))/(n−2) · m₃ / m₂^1.5 (mₖ = Σ(xᵢ − x̄)ᵏ / n)",
)
def skewness(xs: list[float]) -> float:
    n = len(xs)
    d = _deviations(xs)
    m2 = math.fsum(v * v for v in d) / n
    if m2 == 0:
        raise _domain("분산이 0입니다.")
    m3 = math.fsum(v**3 for v in d) / n
    return math.sqrt(n * (n - 1)) / (n - 2) * m3 / m2**1.5


@register(
    "kurtosis",
    4,
    True,
    "원소 4개 이상, 분산 ≠ 0",
    "n(n+1)/((n−1)(n−2)(n−3)) · Σ(xᵢ − x̄)⁴ / s⁴ − 3(n−1)²/((n−2)(n−3))",
)
def kurtosis(xs: list[float]) -> float:
    n = len(xs)
    s2 = _sample_variance(xs)
    if s2 == 0:
        raise _domain("분산이 0입니다.")
    fourth = math.fsum(d**4 for d in _deviations(xs))
    scale = n * (n + 1) / ((n - 1) * (n - 2) * (n - 3))
    correction = 3 * (n - 1) ** 2 / ((n - 2) * (n - 3))
    return scale * fourth / (s2 * s2) - correction


# ──────────────────────────────────────────────
# 순서 의존
# ──────────────────────────────────────────────
@register(
    "durbinWatson",
    1,
    False,
    "모든 원소가 0이면 안 됨 (Σxᵢ² ≠ 0)",
    "Σᵢ₌₂(xᵢ − xᵢ₋₁)² / Σxᵢ²",
)
def durbin_watson(xs: list[float]) -> float:
    denominator = math.fsum(x * x for x in xs)
    if denominator == 0:
        raise _domain("모든 원소가 0입니다.")
    numerator = math.fsum((xs[i] - xs[i - 1]) ** 2 for i in range(1, len(xs)))
    return numerator / denominator


@register(
    "autoCorrelation_lag1",
    2,
    False,
    "원소 2개 이상, 분산 ≠ 0",
    "Σᵢ₌₂(xᵢ − x̄)(xᵢ₋₁ − x̄) / Σ(xᵢ − x̄)²",
)
def auto_correlation_lag1(xs: list[float]) -> float:
    d = _deviations(xs)
    denominator = math.fsum(v * v for v in d)
    if denominator == 0:
        raise _domain("분산이 0입니다.")
    return math.fsum(d[i] * d[i - 1] for i in range(1, len(d))) / denominator


@register(
    "lag1Difference_sum",
    1,
    False,
    "원소 1개 이상",
    "Σᵢ₌₂(xᵢ − xᵢ₋₁)",
)
def lag1_difference_sum(xs: list[float]) -> float:
    return math.fsum(xs[i] - xs[i - 1] for i in range(1, len(xs)))


# ──────────────────────────────────────────────
# 극값 / 곱 / 거듭제곱 합
# ──────────────────────────────────────────────
@register("min_value", 1, True, "원소 1개 이상", "min xᵢ")
def min_value(xs: list[float]) -> float:
    return min(xs)


@register("max_value", 1, True, "원소 1개 이상", "max xᵢ")
def max_value(xs: list[float]) -> float:
    return max(xs)


@register("product", 0, True, "제약 없음 (빈 리스트는 1)", "Πxᵢ")
def product(xs: list[float]) -> float:
    # 정렬 후 곱한다 (순서와 무관하게 같은 값)
    return math.prod(sorted(xs))


@register("sumOfSquares", 0, True, "제약 없음 (빈 리스트는 0)", "Σxᵢ²")
def sum_of_squares(xs: list[float]) -> float:
    return math.fsum(x * x for x in xs)


@register(
    "sumOfLogs", 0, True, "모든 원소가 0보다 커야 함 (빈 리스트는 0)", "Σ ln xᵢ"
)
def sum_of_logs(xs: list[float]) -> float:
    if any(x <= 0 for x in xs):
        raise _domain("0 이하의 원소가 있습니다.")
    return math.fsum(math.log(x) for x in xs)


# ──────────────────────────────────────────────
# 공개 API
# ──────────────────────────────────────────────
def list_methods() -> list[MethodDescriptor]:
    """코퍼스 전체 메서드 목록 (등록 순서)"""
    return [entry.descriptor for entry in _REGISTRY.values()]


def get_descriptor(name: str) -> MethodDescriptor:
    """메서드 이름으로 메타데이터를 조회합니다."""
    if name not in _REGISTRY:
        raise MethodLookupError(f"코퍼스에 없는 메서드입니다: {name}")
    return _REGISTRY[name].descriptor


def resolve_methods(names: list[str] | None) -> list[str]:
    """메서드 이름 목록을 검증합니다. None 또는 빈 목록이면 전체 코퍼스."""
    if not names:
        return list(_REGISTRY)
    unknown = [name for name in names if name not in _REGISTRY]
    if unknown:
        raise MethodLookupError(f"코퍼스에 없는 메서드입니다: {', '.join(unknown)}")
    return list(names)


def evaluate(name: str, values: Sequence[Number]) -> ExecutionOutcome:
    """메서드를 실행하고 결과를 반환합니다. 프로세스를 중단시키지 않습니다.

    Raises:
        MethodLookupError: 코퍼스에 없는 메서드 이름
    """
    if name not in _REGISTRY:
        raise MethodLookupError(f"코퍼스에 없는 메서드입니다: {name}")
    entry = _REGISTRY[name]

    if len(values) < entry.descriptor.min_arity:
        return ExecutionOutcome.fail(
            FailureKind.ARITY_ERROR,
            f"원소 {entry.descriptor.min_arity}개 이상 필요 (입력 {len(values)}개)",
        )

    try:
        xs = [float(v) for v in values]
        result = entry.func(xs)
    except _Failure as e:
        return ExecutionOutcome.fail(e.kind, str(e))
    except OverflowError as e:
        return ExecutionOutcome.fail(FailureKind.OVERFLOW, str(e))
    except (ZeroDivisionError, ValueError) as e:
        return ExecutionOutcome.fail(FailureKind.DOMAIN_ERROR, str(e))

    if not math.isfinite(result):
        return ExecutionOutcome.fail(FailureKind.NONFINITE, f"결과가 유한하지 않음: {result}")
    return ExecutionOutcome.ok(canonical_real(result))
