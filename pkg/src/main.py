"""MetaTrimmer - 메인 오케스트레이터

Usage:
    poetry run python -m src.main pipeline --preset rq1 --seed 7
    poetry run python -m src.main gen --low 1 --high 50 --count 1000 -o td.json
    poetry run python -m src.main transform -i td.json -o transformed.json
    poetry run python -m src.main run -i transformed.json -o execution/
    poetry run python -m src.main check -i execution/ -o checked/
    poetry run python -m src.main analyze -i checked/ -o analysis.json
    poetry run python -m src.main mine -i checked/ -o analysis.json

종료 코드: 0 성공, 1 예기치 않은 오류, 2 설정 오류, 3 아티팩트/GT 오류,
4 메서드 조회 오류, 130 사용자 중단
"""

from __future__ import annotations

import argparse
import asyncio
import os
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from src import __version__
from src.analyzer.analyser import (
    aggregate,
    compare_to_groundtruth,
    load_groundtruth,
    render_table,
)
from src.analyzer.summary import select_mrs, summarize
from src.checker.mr_checker import check_all
from src.config import PRESETS, Settings
from src.errors import ConfigError, MetaTrimmerError, SchemaError
from src.executor.external import execute_external, split_command
from src.executor.runner import MTRunner
from src.generator.fuzzer import generate
from src.logger import get_logger, setup_logger
from src.miner.rules import mine_constraints
from src.models import RunManifest, Verdict
from src.relations.catalog import build_catalog, transform_all
from src.storage.artifacts import (
    AnalysisArtifact,
    ArtifactKind,
    ExecutionArtifact,
    TdArtifact,
    TransformedArtifact,
    read,
    write,
)

logger = get_logger("main")

EXIT_INTERRUPTED = 130


@dataclass(frozen=True)
class RunPaths:
    """파이프라인 아티팩트 경로"""

    td: Path
    transformed: Path
    execution: Path
    checked: Path
    analysis: Path

    @classmethod
    def under(cls, root: str | Path) -> RunPaths:
        root = Path(root)
        return cls(
            td=root / "td.json",
            transformed=root / "transformed.json",
            execution=root / "execution",
            checked=root / "checked",
            analysis=root / "analysis.json",
        )

    def relative_to_analysis(self) -> dict[str, str]:
        """분석 파일 위치 기준 상대 경로 (출력 디렉토리와 무관한 매니페스트용)"""
        base = self.analysis.parent
        return {
            "td": os.path.relpath(self.td, base),
            "transformed": os.path.relpath(self.transformed, base),
            "execution": os.path.relpath(self.execution, base),
            "checked": os.path.relpath(self.checked, base),
            "analysis": self.analysis.name,
        }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _read_executions(directory: Path) -> list[ExecutionArtifact]:
    """디렉토리의 실행 아티팩트를 메서드 이름순으로 읽습니다."""
    if not directory.is_dir():
        raise SchemaError(f"실행 아티팩트 디렉토리가 없습니다: {directory}")
    files = sorted(directory.glob("*.json"))
    if not files:
        raise SchemaError(f"실행 아티팩트가 없습니다: {directory}")
    artifacts = [read(ArtifactKind.EXECUTION, f) for f in files]
    return sorted(artifacts, key=lambda a: a.method)


def _clear_artifacts(directory: Path) -> None:
    """이전 실행이 남긴 메서드별 아티팩트를 지웁니다."""
    stale = sorted(directory.glob("*.json")) if directory.is_dir() else []
    for path in stale:
        path.unlink()
    if stale:
        logger.info("이전 아티팩트 %d개 삭제: %s", len(stale), directory)


def _checked_verdicts(artifacts: list[ExecutionArtifact]) -> list[Verdict]:
    verdicts: list[Verdict] = []
    for artifact in artifacts:
        if artifact.verdicts is None:
            raise SchemaError(f"{artifact.method}: 판정되지 않은 실행 아티팩트입니다.")
        verdicts.extend(artifact.verdicts)
    return verdicts


class MetaTrimmerPipeline:
    """단계별 실행과 전체 파이프라인을 담당하는 오케스트레이터

    단계 사이의 데이터는 항상 아티팩트 파일로 전달되므로, 단계별 실행과
    전체 실행은 같은 바이트를 읽고 같은 결과를 만든다.
    """

    def __init__(self, settings: Settings, paths: RunPaths) -> None:
        self.settings = settings
        self.paths = paths
        self.started_at = _now()

    # ──────────────────────────────────────────────
    # 단계 1: 테스트 데이터 생성
    # ──────────────────────────────────────────────
    async def gen(self, seed: int) -> TdArtifact:
        """퍼저로 테스트 데이터를 생성합니다."""
        logger.info("═══ 단계 1: 테스트 데이터 생성 ═══")
        config = self.settings.fuzz_config(seed)
        artifact = TdArtifact(config=config, data=generate(config))
        write(ArtifactKind.TD, artifact, self.paths.td)
        return artifact

    # ──────────────────────────────────────────────
    # 단계 2: MR 변환
    # ──────────────────────────────────────────────
    async def transform(self, seed: int | None = None) -> TransformedArtifact:
        """테스트 데이터에 활성화된 MR을 적용합니다. 시드는 기본적으로 TD의 시드입니다."""
        logger.info("═══ 단계 2: MR 변환 ═══")
        td = read(ArtifactKind.TD, self.paths.td)
        assert isinstance(td, TdArtifact)
        seed = td.config.seed if seed is None else seed

        specs = build_catalog(
            td.config,
            add_constant=self.settings.relations.add_constant,
            mul_factor=self.settings.relations.mul_factor,
            mrs=self.settings.enabled_mrs(),
        )
        table = transform_all(specs, td.data, seed)
        artifact = TransformedArtifact(
            seed=seed, specs=specs, data=td.data, table=table
        )
        write(ArtifactKind.TRANSFORMED, artifact, self.paths.transformed)
        return artifact

    # ──────────────────────────────────────────────
    # 단계 3: 실행
    # ──────────────────────────────────────────────
    async def run(
        self, external: str | None = None, name: str = "external"
    ) -> list[ExecutionArtifact]:
        """원본/후속 데이터를 실행하고 메서드별 실행 아티팩트를 씁니다."""
        logger.info("═══ 단계 3: MT 실행 ═══")
        transformed = read(ArtifactKind.TRANSFORMED, self.paths.transformed)
        assert isinstance(transformed, TransformedArtifact)
        if not transformed.data:
            raise ConfigError("실행할 테스트 데이터가 없습니다.")

        if external:
            records = await execute_external(
                external,
                transformed.specs,
                transformed.data,
                transformed.table,
                name=name,
                timeout=self.settings.runner.external_timeout,
            )
            by_method = {name: records}
        else:
            runner = MTRunner(
                self.settings.runner.methods,
                transformed.specs,
                jobs=self.settings.runner.jobs,
            )
            records = await asyncio.to_thread(
                runner.execute, transformed.data, transformed.table
            )
            by_method = {method: [] for method in runner.methods}
            for record in records:
                by_method[record.method].append(record)

        artifacts = [
            ExecutionArtifact(method=method, records=method_records, external=external)
            for method, method_records in by_method.items()
        ]
        _clear_artifacts(self.paths.execution)
        for artifact in artifacts:
            write(
                ArtifactKind.EXECUTION,
                artifact,
                self.paths.execution / f"{artifact.method}.json",
            )
        return artifacts

    # ──────────────────────────────────────────────
    # 단계 4: 판정
    # ──────────────────────────────────────────────
    async def check(self) -> list[ExecutionArtifact]:
        """실행 기록마다 MR 판정을 붙여 checked 디렉토리에 씁니다."""
        logger.info("═══ 단계 4: MR 판정 ═══")
        tolerance = self.settings.runner.tolerance
        if tolerance <= 0:
            raise ConfigError(f"tolerance는 양수여야 합니다: {tolerance}")

        executions = _read_executions(self.paths.execution)
        _clear_artifacts(self.paths.checked)

        checked: list[ExecutionArtifact] = []
        for artifact in executions:
            verdicts = check_all(artifact.records, tolerance=tolerance)
            result = replace(artifact, verdicts=verdicts, tolerance=tolerance)
            write(
                ArtifactKind.EXECUTION,
                result,
                self.paths.checked / f"{artifact.method}.json",
            )
            checked.append(result)
        return checked

    # ──────────────────────────────────────────────
    # 단계 5: 분석
    # ──────────────────────────────────────────────
    def _manifest(self, checked: list[ExecutionArtifact]) -> RunManifest:
        td = read(ArtifactKind.TD, self.paths.td)
        transformed = read(ArtifactKind.TRANSFORMED, self.paths.transformed)
        assert isinstance(td, TdArtifact)
        assert isinstance(transformed, TransformedArtifact)
        tolerance = checked[0].tolerance or self.settings.runner.tolerance
        first = transformed.specs[0]
        return RunManifest(
            tool_version=__version__,
            fuzz=td.config,
            add_constant=first.add_constant,
            mul_factor=first.mul_factor,
            mrs=[spec.id for spec in transformed.specs],
            methods=[a.method for a in checked],
            seed=transformed.seed,
            tolerance=tolerance,
            external=checked[0].external,
            artifacts=self.paths.relative_to_analysis(),
            started_at=self.started_at,
            finished_at=_now(),
        )

    async def analyze(self) -> AnalysisArtifact:
        """판정을 집계하고 GT와 비교해 분석 아티팩트를 씁니다."""
        logger.info("═══ 단계 5: 분석 ═══")
        checked = _read_executions(self.paths.checked)
        reports = aggregate(_checked_verdicts(checked))

        comparisons = []
        if self.settings.output.groundtruth:
            gt = load_groundtruth(self.settings.output.groundtruth)
            comparisons = compare_to_groundtruth(reports, gt)

        artifact = AnalysisArtifact(
            manifest=self._manifest(checked),
            reports=reports,
            comparisons=comparisons,
            summary=summarize(reports, comparisons),
            selections=select_mrs(reports),
        )
        write(ArtifactKind.ANALYSIS, artifact, self.paths.analysis)
        return artifact

    # ──────────────────────────────────────────────
    # 단계 6: 제약 마이닝
    # ──────────────────────────────────────────────
    async def mine(self) -> AnalysisArtifact:
        """혼합 쌍에서 제약을 찾아 분석 아티팩트에 추가합니다."""
        logger.info("═══ 단계 6: 제약 마이닝 ═══")
        analysis = read(ArtifactKind.ANALYSIS, self.paths.analysis)
        assert isinstance(analysis, AnalysisArtifact)
        checked = _read_executions(self.paths.checked)

        records = [r for a in checked for r in a.records]
        miner = self.settings.miner
        constraints = mine_constraints(
            records,
            _checked_verdicts(checked),
            analysis.reports,
            min_precision=miner.min_precision,
            min_support=max(1, miner.min_support),
            top_k=miner.top_k,
        )

        analysis.manifest.finished_at = _now()
        result = replace(
            analysis,
            constraints=constraints,
            selections=select_mrs(analysis.reports, constraints),
        )
        write(ArtifactKind.ANALYSIS, result, self.paths.analysis)
        return result

    # ──────────────────────────────────────────────
    # 전체 파이프라인
    # ──────────────────────────────────────────────
    async def run_all(
        self, seed: int, external: str | None = None, name: str = "external"
    ) -> AnalysisArtifact:
        """gen → transform → run → check → analyze → mine을 순서대로 실행합니다."""
        logger.info("╔══════════════════════════════════════╗")
        logger.info("║   MetaTrimmer 파이프라인 시작        ║")
        logger.info("╚══════════════════════════════════════╝")

        await self.gen(seed)
        await self.transform()
        await self.run(external=external, name=name)
        await self.check()
        await self.analyze()
        result = await self.mine()

        logger.info("╔══════════════════════════════════════╗")
        logger.info("║   MetaTrimmer 파이프라인 완료        ║")
        logger.info("╚══════════════════════════════════════╝")
        return result


# ──────────────────────────────────────────────
# CLI
# ──────────────────────────────────────────────
def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=None,
        help="설정 파일 경로 (기본: config/settings.yaml, 없으면 기본값)",
    )
    common.add_argument(
        "--env",
        default="config/.env",
        help="환경 변수 파일 경로 (기본: config/.env)",
    )
    common.add_argument(
        "-d",
        "--dir",
        default=None,
        help="아티팩트 디렉토리 (기본: output.output_dir)",
    )
    return common


def _add_fuzz_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--preset", choices=sorted(PRESETS), help="실험 프리셋")
    parser.add_argument("--low", type=float, help="원소 하한")
    parser.add_argument("--high", type=float, help="원소 상한")
    parser.add_argument("--input-type", choices=["int", "float"], help="원소 유형")
    budget = parser.add_mutually_exclusive_group()
    budget.add_argument("--count", type=int, help="생성할 데이터 수")
    budget.add_argument(
        "--duration", type=float, help="생성 시간 예산(초). 재현할 수 없음"
    )
    parser.add_argument("--min-len", type=int, help="최소 리스트 길이")
    parser.add_argument("--max-len", type=int, help="최대 리스트 길이")
    parser.add_argument("--seed", type=int, help="시드 (기본: MRTRIM_SEED 또는 0)")


def _add_relation_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--add-constant", type=float, help="MR_ADD 상수 (> 0)")
    parser.add_argument("--mul-factor", type=float, help="MR_MUL 배수 (> 1)")
    parser.add_argument("--mrs", help="적용할 MR 목록 (쉼표 구분)")


def _add_run_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--methods", help="실행할 메서드 목록 (쉼표 구분)")
    parser.add_argument("--jobs", type=int, help="작업자 수")
    parser.add_argument("--external", help="외부 SUT 실행 명령")
    parser.add_argument("--name", default="external", help="외부 SUT 이름")
    parser.add_argument("--timeout", type=float, help="외부 SUT 응답 제한 시간(초)")


def _add_analysis_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tolerance", type=float, help="판정 허용 오차 (> 0)")
    parser.add_argument("--groundtruth", help="GT YAML 파일")
    parser.add_argument("--min-precision", type=float, help="제약 최소 정밀도")
    parser.add_argument("--min-support", type=int, help="제약 최소 지지도")


def build_parser() -> argparse.ArgumentParser:
    """CLI 인자 파서를 만듭니다."""
    parser = argparse.ArgumentParser(
        prog="mrtrim",
        description="MetaTrimmer - 테스트 데이터 기반 MR 선택 및 제약 도출",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    gen = sub.add_parser("gen", parents=[common], help="테스트 데이터 생성")
    _add_fuzz_args(gen)
    gen.add_argument("-o", "--output", help="TD 아티팩트 경로")

    transform = sub.add_parser("transform", parents=[common], help="MR 변환")
    transform.add_argument("-i", "--input", help="TD 아티팩트 경로")
    transform.add_argument("-o", "--output", help="변환 아티팩트 경로")
    transform.add_argument("--seed", type=int, help="변환 시드 (기본: TD의 시드)")
    _add_relation_args(transform)

    run = sub.add_parser("run", parents=[common], help="MT 실행")
    run.add_argument("-i", "--input", help="변환 아티팩트 경로")
    run.add_argument("-o", "--output", help="실행 아티팩트 디렉토리")
    _add_run_args(run)

    check = sub.add_parser("check", parents=[common], help="MR 판정")
    check.add_argument("-i", "--input", help="실행 아티팩트 디렉토리")
    check.add_argument("-o", "--output", help="판정 아티팩트 디렉토리")
    check.add_argument("--tolerance", type=float, help="판정 허용 오차 (> 0)")

    analyze = sub.add_parser("analyze", parents=[common], help="집계 및 GT 비교")
    analyze.add_argument("-i", "--input", help="판정 아티팩트 디렉토리")
    analyze.add_argument("-o", "--output", help="분석 아티팩트 경로")
    analyze.add_argument("--groundtruth", help="GT YAML 파일")

    mine = sub.add_parser("mine", parents=[common], help="제약 마이닝")
    mine.add_argument("-i", "--input", help="판정 아티팩트 디렉토리")
    mine.add_argument("-o", "--output", help="분석 아티팩트 경로")
    mine.add_argument("--min-precision", type=float, help="제약 최소 정밀도")
    mine.add_argument("--min-support", type=int, help="제약 최소 지지도")

    pipeline = sub.add_parser("pipeline", parents=[common], help="전체 파이프라인")
    _add_fuzz_args(pipeline)
    _add_relation_args(pipeline)
    _add_run_args(pipeline)
    _add_analysis_args(pipeline)
    pipeline.add_argument("-o", "--output", help="아티팩트 디렉토리")

    return parser


def _split(value: str | None) -> list[str] | None:
    if value is None:
        return None
    return [item.strip() for item in value.split(",") if item.strip()]


def _number(value: float) -> int | float:
    return int(value) if float(value).is_integer() else value


def _check_sut_name(name: str) -> None:
    """외부 SUT 이름은 execution/<이름>.json 파일 이름으로 쓰입니다."""
    if name in ("", ".", "..") or any(sep in name for sep in ("/", "\\", os.sep)):
        raise ConfigError(f"외부 SUT 이름에 경로를 쓸 수 없습니다: {name!r}")


def apply_args(settings: Settings, args: argparse.Namespace) -> Settings:
    """프리셋과 CLI 플래그를 설정에 덮어씁니다 (플래그가 우선)."""
    if getattr(args, "preset", None):
        settings.apply_preset(args.preset)

    fuzz = settings.fuzz
    for flag in ("low", "high"):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(fuzz, flag, _number(value))
    if getattr(args, "input_type", None):
        fuzz.input_type = args.input_type
    if getattr(args, "count", None) is not None:
        fuzz.count, fuzz.duration = args.count, None
    if getattr(args, "duration", None) is not None:
        fuzz.duration = args.duration
    for flag in ("min_len", "max_len"):
        value = getattr(args, flag, None)
        if value is not None:
            setattr(fuzz, flag, value)

    relations = settings.relations
    if getattr(args, "add_constant", None) is not None:
        relations.add_constant = _number(args.add_constant)
    if getattr(args, "mul_factor", None) is not None:
        relations.mul_factor = _number(args.mul_factor)
    if (mrs := _split(getattr(args, "mrs", None))) is not None:
        relations.enabled = mrs

    runner = settings.runner
    if (methods := _split(getattr(args, "methods", None))) is not None:
        runner.methods = methods
    if getattr(args, "jobs", None) is not None:
        if args.jobs < 1:
            raise ConfigError(f"jobs는 1 이상이어야 합니다: {args.jobs}")
        runner.jobs = args.jobs
    if getattr(args, "external", None) is not None:
        split_command(args.external)
        _check_sut_name(getattr(args, "name", "external"))
    if getattr(args, "timeout", None) is not None:
        runner.external_timeout = args.timeout
    if getattr(args, "tolerance", None) is not None:
        runner.tolerance = args.tolerance

    if getattr(args, "groundtruth", None):
        settings.output.groundtruth = args.groundtruth
    if getattr(args, "min_precision", None) is not None:
        settings.miner.min_precision = args.min_precision
    if getattr(args, "min_support", None) is not None:
        settings.miner.min_support = args.min_support
    return settings


def resolve_paths(settings: Settings, args: argparse.Namespace) -> RunPaths:
    """기본 디렉토리 아래 경로에 -i/-o 지정을 반영합니다."""
    root = args.dir or settings.output.output_dir
    if args.command == "pipeline":
        return RunPaths.under(args.output or root)

    paths = RunPaths.under(root)
    field_in, field_out = {
        "gen": (None, "td"),
        "transform": ("td", "transformed"),
        "run": ("transformed", "execution"),
        "check": ("execution", "checked"),
        "analyze": ("checked", "analysis"),
        "mine": ("checked", "analysis"),
    }[args.command]
    overrides: dict[str, Path] = {}
    if field_in and getattr(args, "input", None):
        overrides[field_in] = Path(args.input)
    if getattr(args, "output", None):
        overrides[field_out] = Path(args.output)
    return replace(paths, **overrides)


def load_settings(args: argparse.Namespace) -> Settings:
    """설정 파일을 읽고 CLI 플래그를 반영합니다."""
    settings = Settings.load(
        config_path=args.config or "config/settings.yaml",
        env_path=args.env,
        required=args.config is not None,
    )
    return apply_args(settings, args)


async def dispatch(args: argparse.Namespace, settings: Settings) -> int:
    """서브커맨드를 실행합니다."""
    paths = resolve_paths(settings, args)
    pipeline = MetaTrimmerPipeline(settings, paths)
    external = getattr(args, "external", None)
    name = getattr(args, "name", "external")

    match args.command:
        case "gen":
            await pipeline.gen(settings.resolve_seed(args.seed))
        case "transform":
            await pipeline.transform(args.seed)
        case "run":
            await pipeline.run(external=external, name=name)
        case "check":
            await pipeline.check()
        case "analyze":
            analysis = await pipeline.analyze()
            sys.stdout.write(render_table(analysis.reports))
        case "mine":
            await pipeline.mine()
        case "pipeline":
            analysis = await pipeline.run_all(
                settings.resolve_seed(args.seed), external=external, name=name
            )
            sys.stdout.write(render_table(analysis.reports))
    return 0


def main(argv: list[str] | None = None) -> int:
    """메인 엔트리포인트. 프로세스 종료 코드를 반환합니다."""
    args = build_parser().parse_args(argv)

    try:
        settings = load_settings(args)
        setup_logger(log_dir=settings.output.log_dir)
        for warning in settings.validate():
            logger.warning("설정 경고: %s", warning)
        if getattr(args, "external", None):
            logger.info("외부 SUT 모드: %s", split_command(args.external)[0])
        return asyncio.run(dispatch(args, settings))

    except MetaTrimmerError as e:
        logger.error("%s 실패: %s", args.command, e)
        return e.exit_code
    except KeyboardInterrupt:
        logger.info("사용자에 의해 중단되었습니다.")
        return EXIT_INTERRUPTED
    except Exception as e:
        logger.error("예기치 않은 오류: %s", e, exc_info=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
