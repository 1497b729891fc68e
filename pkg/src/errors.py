"""예외 계층 정의 - CLI 종료 코드와 1:1로 대응"""

from __future__ import annotations


class MetaTrimmerError(Exception):
    """MetaTrimmer 공통 예외"""

    exit_code: int = 1


class ConfigError(MetaTrimmerError):
    """잘못된 설정 값 (FuzzConfig, MrSpec, CLI 플래그 등)"""

    exit_code = 2


class SchemaError(MetaTrimmerError):
    """아티팩트 파일 누락, 파싱 실패 또는 스키마 위반"""

    exit_code = 3

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        if path:
            message = f"{message} (위치: {path})"
        super().__init__(message)


class SchemaVersionError(SchemaError):
    """지원하지 않는 스키마 버전"""


class GroundTruthError(MetaTrimmerError):
    """GT 키에 대응하는 리포트가 없음"""

    exit_code = 3


class MethodLookupError(MetaTrimmerError):
    """코퍼스에 없는 메서드 이름 또는 실행할 수 없는 외부 프로그램"""

    exit_code = 4


class TransformSkipped(MetaTrimmerError):
    """변환 규칙을 적용할 수 없는 입력 (예: 빈 리스트에 대한 EXC)"""
