"""테스트 데이터 특징 추출"""

from __future__ import annotations

import math
from collections.abc import Sequence

from src.models import DataFeatures
from src.numeric import Number, canonical_number

BOOLEAN_FEATURES = (
    "all_positive",
    "has_duplicates",
    "has_negative",
    "has_zero",
    "is_empty",
    "is_sorted",
)
NUMERIC_FEATURES = ("length", "max_val", "min_val", "sum_val")


def featurize(values: Sequence[Number]) -> DataFeatures:
    """입력 리스트의 특징을 계산합니다."""
    values = list(values)
    if not values:
        return DataFeatures(
            length=0,
            min_val=None,
            max_val=None,
            sum_val=None,
            has_negative=False,
            has_zero=False,
            has_duplicates=False,
            is_empty=True,
            all_positive=False,
            is_sorted=True,
        )

    has_negative = any(v < 0 for v in values)
    has_zero = any(v == 0 for v in values)
    if all(isinstance(v, int) for v in values):
        total: Number = sum(values)
    else:
        total = canonical_number(math.fsum(values))

    return DataFeatures(
        length=len(values),
        min_val=min(values),
        max_val=max(values),
        sum_val=total,
        has_negative=has_negative,
        has_zero=has_zero,
        has_duplicates=len(set(values)) < len(values),
        is_empty=False,
        all_positive=not has_negative and not has_zero,
        is_sorted=all(a <= b for a, b in zip(values, values[1:])),
    )
