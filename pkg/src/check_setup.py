"""환경 설정 검증 스크립트

Usage:
    poetry run python -m src.check_setup
"""

from __future__ import annotations

import importlib
import sys
import tempfile
from pathlib import Path

from src.errors import MetaTrimmerError

EXPECTED_METHODS = 25


def check_python_version() -> bool:
    """Python 버전 확인"""
    version = sys.version_info
    ok = version >= (3, 11)
    status = "✅" if ok else "❌"
    msg = "OK" if ok else "Python 3.11+ 필요"
    print(f"{status} Python {version.major}.{version.minor}.{version.micro} ... {msg}")
    return ok


def check_package(module: str, label: str) -> bool:
    """필수 패키지 설치 확인"""
    try:
        imported = importlib.import_module(module)
    except ImportError:
        print(f"❌ {label} ... 미설치 (poetry install)")
        return False
    version = getattr(imported, "__version__", "")
    print(f"✅ {label} ... OK{f' (v{version})' if version else ''}")
    return True


def check_config_files() -> bool:
    """설정 파일 존재 확인 (없으면 기본값으로 동작)"""
    settings_exists = Path("config/settings.yaml").exists()
    env_exists = Path("config/.env").exists()

    if settings_exists:
        print("✅ config/settings.yaml ... OK")
    else:
        print(
            "⚠️  config/settings.yaml ... 없음, 기본값 사용 "
            "(cp config/settings.example.yaml config/settings.yaml)"
        )

    if env_exists:
        print("✅ config/.env ... OK")
    else:
        print("⚠️  config/.env ... 없음 (cp config/.env.example config/.env)")

    return settings_exists and env_exists


def check_corpus() -> bool:
    """내장 코퍼스 자체 검사: 메서드 수, 이름 중복, 대표 입력 평가"""
    from src.corpus.methods import evaluate, list_methods

    methods = list_methods()
    names = [m.name for m in methods]
    if len(names) != EXPECTED_METHODS or len(set(names)) != len(names):
        print(f"❌ SUT corpus ... 메서드 {len(names)}개 (기대: {EXPECTED_METHODS}개, 중복 없음)")
        return False

    sample = [1, 2, 3, 4, 5]
    failed = [name for name in names if evaluate(name, sample).is_failure]
    if failed:
        print(f"❌ SUT corpus ... 대표 입력 평가 실패: {', '.join(failed)}")
        return False

    print(f"✅ SUT corpus ... OK ({len(names)}개 메서드)")
    return True


def check_output_dir(output_dir: str) -> bool:
    """출력 디렉토리 쓰기 가능 확인"""
    path = Path(output_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
        with tempfile.NamedTemporaryFile(dir=path):
            pass
    except OSError as e:
        print(f"❌ Output directory ... 쓰기 불가 ({path}: {e})")
        return False
    print(f"✅ Output directory ... OK ({path})")
    return True


def main() -> int:
    """모든 설정 항목을 검증합니다."""
    print("=" * 50)
    print("  MetaTrimmer - 환경 설정 검증")
    print("=" * 50)
    print()

    results = []

    # 기본 확인
    results.append(check_python_version())
    results.append(check_package("numpy", "numpy"))
    results.append(check_package("jsonschema", "jsonschema"))
    results.append(check_package("yaml", "PyYAML"))
    results.append(check_package("dotenv", "python-dotenv"))
    print()

    # 설정 파일 확인
    config_ok = check_config_files()
    print()

    # 설정 기반 확인
    try:
        from src.config import Settings

        settings = Settings.load()
        for warning in settings.validate():
            print(f"⚠️  설정 경고 ... {warning}")
        results.append(check_corpus())
        results.append(check_output_dir(settings.output.output_dir))
    except MetaTrimmerError as e:
        print(f"❌ 설정 로드 실패 ... {e}")
        results.append(False)

    print()
    print("=" * 50)

    if all(results):
        note = "" if config_ok else " (설정 파일 없음: 기본값 사용)"
        print(f"✅ All checks passed!{note}")
    else:
        failed = results.count(False)
        print(f"⚠️  {failed}개 항목에 주의가 필요합니다.")

    print("=" * 50)
    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
