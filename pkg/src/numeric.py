"""수치 정규화 - 아티팩트에 기록되는 실수의 표준 형태"""

from __future__ import annotations

import math

import numpy as np

SIGNIFICANT_DIGITS = 9
EXPONENT_THRESHOLD = 1e9

Number = int | float


def canonical_real(value: float) -> float:
    """실수를 유효숫자 9자리로 반올림합니다."""
    if value == 0:
        return 0.0
    return float(f"{value:.{SIGNIFICANT_DIGITS}g}")


def canonical_number(value: Number) -> Number:
    """정수는 그대로, 실수는 canonical_real로 정규화합니다."""
    if isinstance(value, bool):
        raise TypeError("bool은 수치 값으로 사용할 수 없습니다.")
    if isinstance(value, (int, np.integer)):
        return int(value)
    return canonical_real(float(value))


def canonical_values(values) -> list[Number]:
    """리스트의 모든 원소를 정규화합니다."""
    return [canonical_number(v) for v in values]


def is_integral(value: Number) -> bool:
    """정수 값인지 확인합니다 (3.0 포함)."""
    if isinstance(value, int):
        return True
    return math.isfinite(value) and float(value).is_integer()


def format_number(value: Number) -> str:
    """JSON 직렬화용 수치 표기.

    정수는 그대로, 1e9 미만의 실수는 지수 없이 유효숫자 9자리 이내로,
    그 이상은 지수 표기로 출력합니다. 실수는 항상 소수점을 포함합니다 (52.0).
    """
    if isinstance(value, int):
        return str(value)
    if not math.isfinite(value):
        raise ValueError(f"유한하지 않은 값은 기록할 수 없습니다: {value}")
    if value == 0:
        return "0.0"
    if abs(value) >= EXPONENT_THRESHOLD:
        return np.format_float_scientific(
            value, precision=SIGNIFICANT_DIGITS - 1, unique=False, trim="0"
        )
    return np.format_float_positional(
        value,
        precision=SIGNIFICANT_DIGITS,
        unique=False,
        fractional=False,
        trim="0",
    )
