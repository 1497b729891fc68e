"""로깅 설정 테스트"""

import logging

import pytest

from src.logger import LEVEL_ENV, LOG_FILE, get_logger, resolve_level, setup_logger


@pytest.fixture
def fresh_logger(request):
    """테스트마다 고유한 이름의 로거 (핸들러 정리 포함)"""
    name = f"mrtrim-test-{request.node.name}"
    yield name
    logger = logging.getLogger(name)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


def _kinds(name):
    return sorted(type(h).__name__ for h in logging.getLogger(name).handlers)


class TestResolveLevel:
    """resolve_level 테스트"""

    def test_argument_wins(self, monkeypatch):
        """인자가 환경 변수보다 우선"""
        monkeypatch.setenv(LEVEL_ENV, "ERROR")
        assert resolve_level("debug") == (logging.DEBUG, None)

    def test_environment(self, monkeypatch):
        """인자가 없으면 LOG_LEVEL"""
        monkeypatch.setenv(LEVEL_ENV, "WARNING")
        assert resolve_level() == (logging.WARNING, None)

    def test_default_info(self, monkeypatch):
        """둘 다 없으면 INFO"""
        monkeypatch.delenv(LEVEL_ENV, raising=False)
        assert resolve_level() == (logging.INFO, None)

    def test_unknown_name(self):
        """알 수 없는 이름은 INFO와 경고"""
        level, warning = resolve_level("LOUD")
        assert level == logging.INFO
        assert "LOUD" in warning


class TestSetupLogger:
    """setup_logger 테스트"""

    def test_console_only(self, fresh_logger):
        """log_dir 없으면 stderr 핸들러 하나"""
        setup_logger(fresh_logger, level="INFO")
        assert _kinds(fresh_logger) == ["StreamHandler"]

    def test_idempotent(self, fresh_logger, tmp_path):
        """여러 번 호출해도 핸들러가 늘지 않음"""
        for _ in range(3):
            setup_logger(fresh_logger, level="INFO", log_dir=str(tmp_path))
        assert _kinds(fresh_logger) == ["FileHandler", "StreamHandler"]

    def test_file_handler_follows_log_dir(self, fresh_logger, tmp_path):
        """log_dir이 바뀌면 파일 핸들러도 옮겨감"""
        first, second = tmp_path / "a", tmp_path / "b"
        setup_logger(fresh_logger, level="INFO", log_dir=str(first))
        logger = setup_logger(fresh_logger, level="INFO", log_dir=str(second))
        logger.info("두 번째")
        for handler in logger.handlers:
            handler.flush()

        assert _kinds(fresh_logger) == ["FileHandler", "StreamHandler"]
        assert "두 번째" in (second / LOG_FILE).read_text(encoding="utf-8")
        assert "두 번째" not in (first / LOG_FILE).read_text(encoding="utf-8")

    def test_empty_log_dir_detaches_file(self, fresh_logger, tmp_path):
        """log_dir을 비우면 파일 핸들러를 떼어냄"""
        setup_logger(fresh_logger, level="INFO", log_dir=str(tmp_path))
        setup_logger(fresh_logger, level="INFO", log_dir="")
        assert _kinds(fresh_logger) == ["StreamHandler"]

    def test_level_is_updated(self, fresh_logger):
        """재호출 시 레벨은 갱신됨"""
        setup_logger(fresh_logger, level="INFO")
        assert setup_logger(fresh_logger, level="DEBUG").level == logging.DEBUG


class TestGetLogger:
    """get_logger 테스트"""

    def test_child_name(self):
        """mrtrim.<module> 하위 로거"""
        assert get_logger("executor.external").name == "mrtrim.executor.external"
