"""구조화된 로깅 설정 모듈

로그는 stderr(와 선택적으로 ``<log_dir>/mrtrim.log``)로만 나간다.
stdout은 ``analyze`` / ``pipeline``이 출력하는 분석 표 전용이다.
"""

from __future__ import annotations

import logging
import os
import sys
from pathlib import Path

ROOT_LOGGER = "mrtrim"
LOG_FILE = "mrtrim.log"
LEVEL_ENV = "LOG_LEVEL"
LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")

# 2026-10-18 10:00:05 | INFO    | mrtrim.executor      | message
_FORMATTER = logging.Formatter(
    fmt="%(asctime)s | %(levelname)-7s | %(name)-20s | %(message)s",
    datefmt="%Y-%m-%d %H:%M:%S",
)


def resolve_level(level: str | None = None) -> tuple[int, str | None]:
    """로그 레벨을 결정합니다. 인자 > LOG_LEVEL 환경 변수 > INFO.

    Returns:
        (레벨, 경고 메시지). 알 수 없는 이름이면 INFO와 경고를 돌려준다.
    """
    name = (level or os.getenv(LEVEL_ENV) or "INFO").strip().upper()
    if name not in LEVELS:
        return logging.INFO, f"알 수 없는 로그 레벨 {name!r}, INFO 사용"
    return getattr(logging, name), None


def _file_handlers(logger: logging.Logger) -> list[logging.FileHandler]:
    return [h for h in logger.handlers if isinstance(h, logging.FileHandler)]


def _attach_file(logger: logging.Logger, log_dir: str) -> None:
    target = (Path(log_dir) / LOG_FILE).resolve()
    for handler in _file_handlers(logger):
        if Path(handler.baseFilename) == target:
            return
        logger.removeHandler(handler)
        handler.close()

    target.parent.mkdir(parents=True, exist_ok=True)
    file_handler = logging.FileHandler(target, encoding="utf-8")
    file_handler.setFormatter(_FORMATTER)
    logger.addHandler(file_handler)


def setup_logger(
    name: str = ROOT_LOGGER,
    level: str | None = None,
    log_dir: str | None = None,
) -> logging.Logger:
    """프로젝트 루트 로거를 설정하고 반환합니다.

    같은 프로세스에서 여러 번 호출해도 콘솔 핸들러는 하나만 유지한다.
    ``log_dir``이 바뀌면 파일 핸들러를 새 경로로 옮기고, 비어 있으면 떼어낸다.

    Args:
        name: 로거 이름
        level: 로그 레벨 (DEBUG, INFO, WARNING, ERROR). None이면 LOG_LEVEL
        log_dir: 로그 파일 디렉토리 (None 또는 ""이면 콘솔만 출력)

    Returns:
        설정된 Logger 인스턴스
    """
    logger = logging.getLogger(name)
    resolved, warning = resolve_level(level)
    logger.setLevel(resolved)

    if not any(type(h) is logging.StreamHandler for h in logger.handlers):
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(_FORMATTER)
        logger.addHandler(console_handler)

    if log_dir:
        _attach_file(logger, log_dir)
    else:
        for handler in _file_handlers(logger):
            logger.removeHandler(handler)
            handler.close()

    if warning:
        logger.warning(warning)
    return logger


def get_logger(module_name: str) -> logging.Logger:
    """모듈별 하위 로거를 반환합니다 (예: "executor.external" → mrtrim.executor.external)."""
    return logging.getLogger(f"{ROOT_LOGGER}.{module_name}")
