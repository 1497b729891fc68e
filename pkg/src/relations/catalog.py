"""MR 카탈로그 - 6개 사전 정의 MR의 입력 변환과 기대 출력 관계

| MR      | 입력 변환                         | 기대 관계 (후속 vs 원본) |
|---------|-----------------------------------|--------------------------|
| MR_ADD  | 모든 원소에 add_constant 더하기   | 후속 ≥ 원본              |
| MR_MUL  | 모든 원소에 mul_factor 곱하기     | 후속 ≥ 원본              |
| MR_PER  | 원소 순서를 무작위 치환           | 후속 = 원본              |
| MR_INV  | 모든 원소 부호 반전               | 후속 ≤ 원본              |
| MR_INC  | [low, high]의 무작위 원소 추가    | 후속 ≥ 원본              |
| MR_EXC  | 무작위 위치의 원소 하나 제거      | 후속 ≤ 원본              |
"""

from __future__ import annotations

import numpy as np

from src.errors import TransformSkipped
from src.generator.fuzzer import draw_elements
from src.generator.rng import transform_stream
from src.logger import get_logger
from src.models import (
    EXPECTED_RELATIONS,
    FuzzConfig,
    MrId,
    MrSpec,
    Relation,
    TestDatum,
    TransformedDatum,
    TransformTable,
)
from src.numeric import Number, canonical_number

logger = get_logger("relations")


def expected_relation(mr: MrId) -> Relation:
    """MR의 기대 출력 관계를 반환합니다."""
    return EXPECTED_RELATIONS[mr]


def build_catalog(
    config: FuzzConfig,
    add_constant: Number = 3,
    mul_factor: Number = 2,
    mrs: list[MrId] | None = None,
) -> list[MrSpec]:
    """생성 설정에 맞춘 MR 목록을 만듭니다 (카탈로그 순서 유지)."""
    wanted = list(MrId) if mrs is None else [m for m in MrId if m in set(mrs)]
    specs = [
        MrSpec(
            id=mr,
            add_constant=add_constant,
            mul_factor=mul_factor,
            inc_low=config.low,
            inc_high=config.high,
            inc_type=config.input_type,
        )
        for mr in wanted
    ]
    for spec in specs:
        spec.validate()
    return specs


def _permute(values: tuple[Number, ...], rng: np.random.Generator) -> list[Number]:
    n = len(values)
    if n < 2:
        return list(values)
    order = rng.permutation(n)
    # 항등 치환이면 한 칸 회전
    if all(int(i) == pos for pos, i in enumerate(order)):
        order = np.roll(order, 1)
    return [values[int(i)] for i in order]


def transform(
    spec: MrSpec, datum: TestDatum, rng: np.random.Generator
) -> TransformedDatum:
    """MR 변환 규칙을 데이터에 적용합니다. 입력 데이터는 변경하지 않습니다.

    Raises:
        TransformSkipped: 빈 리스트에 MR_EXC를 적용하려는 경우
    """
    values = datum.values

    match spec.id:
        case MrId.ADD:
            result = [canonical_number(v + spec.add_constant) for v in values]
        case MrId.MUL:
            result = [canonical_number(v * spec.mul_factor) for v in values]
        case MrId.PER:
            result = _permute(values, rng)
        case MrId.INV:
            result = [canonical_number(-v) for v in values]
        case MrId.INC:
            extra = draw_elements(rng, spec.inc_low, spec.inc_high, spec.inc_type, 1)
            result = [*values, *extra]
        case MrId.EXC:
            if not values:
                raise TransformSkipped(
                    f"{spec.id.value}: 빈 리스트에서 제거할 원소가 없습니다."
                )
            index = int(rng.integers(0, len(values)))
            result = [v for i, v in enumerate(values) if i != index]

    return TransformedDatum(source_id=datum.id, mr=spec.id, values=tuple(result))


def transform_all(
    specs: list[MrSpec], data: list[TestDatum], seed: int
) -> TransformTable:
    """모든 데이터에 모든 MR을 적용합니다.

    (seed, MR, 데이터 id)별 독립 스트림을 사용하므로 결과는 메서드와 무관하며,
    건너뛴 변환은 None으로 기록합니다.
    """
    table: TransformTable = {}
    skipped = 0

    for datum in data:
        row: dict[MrId, TransformedDatum | None] = {}
        for spec in specs:
            rng = transform_stream(seed, spec.id.value, datum.id)
            try:
                row[spec.id] = transform(spec, datum, rng)
            except TransformSkipped as e:
                logger.debug("변환 건너뜀 (datum=%d): %s", datum.id, e)
                row[spec.id] = None
                skipped += 1
        table[datum.id] = row

    logger.info(
        "변환 완료: 데이터 %d건 × MR %d개 (건너뜀 %d건)", len(data), len(specs), skipped
    )
    return table
