"""랜덤 퍼저 - 시드 기반 수치 리스트 테스트 데이터 생성"""

from __future__ import annotations

import math
import time

import numpy as np

from src.generator.rng import GENERATE_LABEL, derive_stream
from src.logger import get_logger
from src.models import CountBudget, FuzzConfig, InputType, TestDatum
from src.numeric import Number, canonical_real

logger = get_logger("generator")

FLOAT_DECIMALS = 6


def draw_elements(
    rng: np.random.Generator,
    low: Number,
    high: Number,
    input_type: InputType,
    size: int,
) -> list[Number]:
    """[low, high]에서 size개의 원소를 균등 추출합니다 (양 끝 포함)."""
    if input_type == InputType.INT:
        int_low, int_high = math.ceil(low), math.floor(high)
        drawn = rng.integers(int_low, int_high, size=size, endpoint=True)
        return [int(v) for v in drawn]

    drawn = rng.uniform(low, high, size=size)
    # 반올림 후에도 구간을 벗어나지 않도록 클램프
    return [
        float(min(max(canonical_real(round(float(v), FLOAT_DECIMALS)), low), high))
        for v in drawn
    ]


class Fuzzer:
    """FuzzConfig에 따라 테스트 데이터를 생성하는 순수 랜덤 퍼저"""

    def __init__(self, config: FuzzConfig) -> None:
        config.validate()
        self.config = config
        self._rng = derive_stream(config.seed, GENERATE_LABEL)

    def _next_datum(self, datum_id: int) -> TestDatum:
        length = int(
            self._rng.integers(self.config.min_len, self.config.max_len, endpoint=True)
        )
        values = draw_elements(
            self._rng,
            self.config.low,
            self.config.high,
            self.config.input_type,
            length,
        )
        return TestDatum(id=datum_id, values=tuple(values))

    def generate(self) -> list[TestDatum]:
        """예산이 소진될 때까지 데이터를 생성합니다."""
        budget = self.config.budget
        data: list[TestDatum] = []

        if isinstance(budget, CountBudget):
            for i in range(budget.n):
                data.append(self._next_datum(i))
        else:
            started = time.monotonic()
            while True:
                data.append(self._next_datum(len(data)))
                if time.monotonic() - started >= budget.seconds:
                    break

        empty = sum(1 for d in data if not d.values)
        logger.info(
            "테스트 데이터 %d건 생성 (구간 [%s, %s], %s, 빈 리스트 %d건)",
            len(data),
            self.config.low,
            self.config.high,
            self.config.input_type.value,
            empty,
        )
        return data


def generate(config: FuzzConfig) -> list[TestDatum]:
    """설정에 따라 테스트 데이터를 생성합니다.

    같은 설정(시드 포함)으로 두 번 호출하면 원소 단위로 동일한 결과를 반환합니다.
    잘못된 설정이면 ConfigError를 발생시킵니다.
    """
    return Fuzzer(config).generate()
