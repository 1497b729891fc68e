"""결정적 난수 스트림 - 마스터 시드 하나에서 용도별 하위 스트림을 파생

알고리즘: numpy PCG64 비트 생성기 + SeedSequence.
하위 스트림은 SeedSequence(entropy=seed, spawn_key=레이블 키)로 만든다.
레이블 키는 각 레이블 문자열의 SHA-256 앞 4바이트(빅엔디언)이다.
따라서 변환용 스트림("transform", MR, 데이터 id)은 생성용 스트림("generate")과
독립적이며, 같은 (seed, 레이블)이면 어느 프로세스/스레드에서도 동일한 수열을 낸다.
"""

from __future__ import annotations

import hashlib

import numpy as np

GENERATE_LABEL = "generate"
TRANSFORM_LABEL = "transform"


def label_key(label: str | int) -> int:
    """레이블을 32비트 spawn key로 변환합니다."""
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "big")


def derive_stream(seed: int, *labels: str | int) -> np.random.Generator:
    """(seed, labels)로 결정되는 독립 난수 스트림을 반환합니다."""
    spawn_key = tuple(label_key(label) for label in labels)
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=spawn_key)
    return np.random.Generator(np.random.PCG64(sequence))


def transform_stream(seed: int, mr_name: str, datum_id: int) -> np.random.Generator:
    """(seed, MR, 데이터 id)에 대한 변환용 스트림"""
    return derive_stream(seed, TRANSFORM_LABEL, mr_name, datum_id)
