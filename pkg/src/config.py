"""설정 관리 모듈 - YAML + .env 기반 설정 로드 및 검증"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml
from dotenv import load_dotenv

from src.errors import ConfigError
from src.models import CountBudget, DurationBudget, FuzzConfig, InputType, MrId

SEED_ENV = "MRTRIM_SEED"

# 실험 구성 두 가지를 이름으로 묶은 프리셋
PRESETS: dict[str, dict] = {
    "rq1": {"low": 1, "high": 50, "input_type": "int", "min_len": 2, "max_len": 20},
    "rq2": {"low": -15, "high": 15, "input_type": "int", "min_len": 0, "max_len": 20},
}


@dataclass
class FuzzSettings:
    """퍼저 설정"""

    low: int | float = 1
    high: int | float = 50
    input_type: str = "int"  # "int" | "float"
    count: int = 1000
    duration: float | None = None
    min_len: int = 2
    max_len: int = 20
    seed: int | None = None


@dataclass
class RelationSettings:
    """MR 변환 파라미터"""

    add_constant: int | float = 3
    mul_factor: int | float = 2
    enabled: list[str] = field(default_factory=lambda: [m.value for m in MrId])


@dataclass
class RunnerSettings:
    """실행기 설정"""

    jobs: int = 1
    tolerance: float = 1e-9
    external_timeout: float = 2.0
    methods: list[str] = field(default_factory=list)  # 비어 있으면 전체 코퍼스


@dataclass
class MinerSettings:
    """제약 조건 마이닝 설정"""

    min_precision: float = 0.95
    min_support: int = 5
    top_k: int = 3


@dataclass
class OutputSettings:
    """출력 설정"""

    output_dir: str = "data/run"
    log_dir: str = "data/logs"
    groundtruth: str = ""


@dataclass
class Settings:
    """전체 애플리케이션 설정"""

    fuzz: FuzzSettings = field(default_factory=FuzzSettings)
    relations: RelationSettings = field(default_factory=RelationSettings)
    runner: RunnerSettings = field(default_factory=RunnerSettings)
    miner: MinerSettings = field(default_factory=MinerSettings)
    output: OutputSettings = field(default_factory=OutputSettings)

    @classmethod
    def load(
        cls,
        config_path: str = "config/settings.yaml",
        env_path: str = "config/.env",
        required: bool = False,
    ) -> Settings:
        """설정 파일과 환경 변수를 로드하여 Settings 인스턴스를 생성합니다.

        설정 파일이 없으면 기본값을 사용합니다. required=True이면
        (사용자가 --config로 직접 지정한 경우) ConfigError를 발생시킵니다.
        """
        env_file = Path(env_path)
        if env_file.exists():
            load_dotenv(env_file)

        config_file = Path(config_path)
        if not config_file.exists():
            if required:
                raise ConfigError(f"설정 파일을 찾을 수 없습니다: {config_path}")
            return cls()

        try:
            with open(config_file, encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"설정 파일 파싱 실패: {config_path} - {e}") from e

        if not isinstance(raw, dict):
            raise ConfigError(f"설정 파일 최상위는 매핑이어야 합니다: {config_path}")
        return cls._from_dict(raw)

    @classmethod
    def _from_dict(cls, raw: dict) -> Settings:
        """딕셔너리에서 Settings 인스턴스를 생성합니다."""
        fz_raw = raw.get("fuzz", {}) or {}
        fuzz = FuzzSettings(
            low=fz_raw.get("low", 1),
            high=fz_raw.get("high", 50),
            input_type=cls._resolve_env(fz_raw.get("input_type", "int")),
            count=fz_raw.get("count", 1000),
            duration=fz_raw.get("duration"),
            min_len=fz_raw.get("min_len", 2),
            max_len=fz_raw.get("max_len", 20),
            seed=fz_raw.get("seed"),
        )

        rel_raw = raw.get("relations", {}) or {}
        relations = RelationSettings(
            add_constant=rel_raw.get("add_constant", 3),
            mul_factor=rel_raw.get("mul_factor", 2),
            enabled=rel_raw.get("enabled", [m.value for m in MrId]),
        )

        run_raw = raw.get("runner", {}) or {}
        runner = RunnerSettings(
            jobs=run_raw.get("jobs", 1),
            tolerance=run_raw.get("tolerance", 1e-9),
            external_timeout=run_raw.get("external_timeout", 2.0),
            methods=run_raw.get("methods", []) or [],
        )

        mn_raw = raw.get("miner", {}) or {}
        miner = MinerSettings(
            min_precision=mn_raw.get("min_precision", 0.95),
            min_support=mn_raw.get("min_support", 5),
            top_k=mn_raw.get("top_k", 3),
        )

        out_raw = raw.get("output", {}) or {}
        output = OutputSettings(
            output_dir=cls._resolve_env(out_raw.get("output_dir", "data/run")),
            log_dir=cls._resolve_env(out_raw.get("log_dir", "data/logs")),
            groundtruth=cls._resolve_env(out_raw.get("groundtruth", "")),
        )

        return cls(
            fuzz=fuzz,
            relations=relations,
            runner=runner,
            miner=miner,
            output=output,
        )

    @staticmethod
    def _resolve_env(value: str) -> str:
        """${ENV_VAR} 형식의 값을 환경 변수로 치환합니다."""
        if isinstance(value, str) and value.startswith("${") and value.endswith("}"):
            env_key = value[2:-1]
            return os.getenv(env_key, "")
        return value

    def apply_preset(self, name: str) -> None:
        """프리셋(rq1, rq2)의 퍼저 값을 덮어씁니다."""
        if name not in PRESETS:
            raise ConfigError(f"알 수 없는 프리셋: {name} (가능: {', '.join(PRESETS)})")
        self.fuzz = replace(self.fuzz, **PRESETS[name])

    def resolve_seed(self, flag_seed: int | None = None) -> int:
        """시드 우선순위: --seed > 설정 파일 > MRTRIM_SEED > 0"""
        if flag_seed is not None:
            return flag_seed
        if self.fuzz.seed is not None:
            return int(self.fuzz.seed)
        env_seed = os.getenv(SEED_ENV, "")
        if env_seed:
            try:
                return int(env_seed)
            except ValueError as e:
                raise ConfigError(f"{SEED_ENV} 값이 정수가 아닙니다: {env_seed}") from e
        return 0

    def fuzz_config(self, seed: int) -> FuzzConfig:
        """퍼저 설정을 검증된 FuzzConfig로 변환합니다."""
        try:
            input_type = InputType(self.fuzz.input_type)
        except ValueError as e:
            raise ConfigError(
                f"input_type은 'int' 또는 'float'이어야 합니다: {self.fuzz.input_type}"
            ) from e

        if self.fuzz.duration is not None:
            budget = DurationBudget(float(self.fuzz.duration))
        else:
            budget = CountBudget(int(self.fuzz.count))

        config = FuzzConfig(
            low=self.fuzz.low,
            high=self.fuzz.high,
            input_type=input_type,
            budget=budget,
            min_len=self.fuzz.min_len,
            max_len=self.fuzz.max_len,
            seed=seed,
        )
        config.validate()
        return config

    def enabled_mrs(self) -> list[MrId]:
        """활성화된 MR 목록 (카탈로그 순서)"""
        try:
            wanted = {MrId(name) for name in self.relations.enabled}
        except ValueError as e:
            raise ConfigError(f"알 수 없는 MR 이름: {e}") from e
        if not wanted:
            raise ConfigError("활성화된 MR이 없습니다.")
        return [m for m in MrId if m in wanted]

    def validate(self) -> list[str]:
        """설정 값의 유효성을 검사하고 경고 메시지 리스트를 반환합니다."""
        warnings = []

        if self.fuzz.duration is not None:
            warnings.append(
                "duration 예산은 머신마다 데이터 개수가 달라 재현할 수 없습니다."
            )

        cpu_count = os.cpu_count() or 1
        if self.runner.jobs > cpu_count:
            warnings.append(
                f"jobs({self.runner.jobs})가 CPU 수({cpu_count})보다 많습니다."
            )

        if self.output.groundtruth and not Path(self.output.groundtruth).exists():
            warnings.append(f"GT 파일을 찾을 수 없습니다: {self.output.groundtruth}")

        if self.miner.min_support < 1:
            warnings.append("miner.min_support가 1 미만이면 1로 처리됩니다.")

        return warnings
