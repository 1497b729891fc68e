"""외부 SUT 실행기 - 표준 입출력 기반 줄 단위 JSON 프로토콜

요청:  {"id": <int>, "input": [<numbers>]}\\n
응답:  {"id": <int>, "output": <number>}\\n  또는  {"id": <int>, "error": "<message>"}\\n

실행 기록 e의 원본 요청 id는 2e, 후속 요청 id는 2e+1이다. 호출은 자식
프로세스 하나에서 순차적으로 이루어지고 id는 증가하기만 하므로, 더 작은 id의
응답은 늦게 도착한 줄로 보고 버린다. 그 밖의 id 불일치, 시간 초과, EOF,
너무 긴 줄은 해당 호출의 실패로 기록하고 프로세스를 재시작한다.
"""

from __future__ import annotations

import asyncio
import json
import math
import shlex
from collections.abc import Sequence

from src.errors import ConfigError, MethodLookupError
from src.logger import get_logger
from src.models import (
    ExecutionOutcome,
    ExecutionRecord,
    FailureKind,
    MrSpec,
    TestDatum,
    TransformTable,
)
from src.numeric import Number, canonical_real
from src.relations.catalog import transform_all

logger = get_logger("executor.external")

DEFAULT_TIMEOUT = 2.0
MAX_LINE_BYTES = 16 * 1024 * 1024


def split_command(command: str) -> list[str]:
    """명령 문자열을 셸 규칙으로 나눕니다.

    Raises:
        ConfigError: 따옴표가 닫히지 않았거나 명령이 비어 있는 경우
    """
    try:
        argv = shlex.split(command)
    except ValueError as e:
        raise ConfigError(f"외부 프로그램 명령을 해석할 수 없습니다: {command!r} ({e})") from e
    if not argv:
        raise ConfigError("외부 프로그램 명령이 비어 있습니다.")
    return argv


def wire_ids(exec_id: int) -> tuple[int, int]:
    """실행 기록 하나의 (원본, 후속) 요청 id"""
    return 2 * exec_id, 2 * exec_id + 1


def _protocol_error(message: str) -> ExecutionOutcome:
    return ExecutionOutcome.fail(FailureKind.PROTOCOL_ERROR, message)


def _response_id(line: bytes) -> int | None:
    try:
        message = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError):
        return None
    if not isinstance(message, dict):
        return None
    rid = message.get("id")
    return rid if isinstance(rid, int) and not isinstance(rid, bool) else None


def parse_response(line: bytes | str, request_id: int) -> ExecutionOutcome:
    """응답 한 줄을 ExecutionOutcome으로 변환합니다."""
    try:
        message = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        return _protocol_error(f"응답을 파싱할 수 없습니다: {e}")

    if not isinstance(message, dict):
        return _protocol_error("응답이 JSON 객체가 아닙니다.")
    if message.get("id") != request_id:
        return _protocol_error(
            f"응답 id 불일치 (요청 {request_id}, 응답 {message.get('id')})"
        )

    if "error" in message:
        return ExecutionOutcome.fail(FailureKind.DOMAIN_ERROR, str(message["error"]))

    output = message.get("output")
    if isinstance(output, bool) or not isinstance(output, (int, float)):
        return _protocol_error("응답에 수치 output이 없습니다.")
    try:
        value = float(output)
    except OverflowError:
        return ExecutionOutcome.fail(FailureKind.OVERFLOW, "output이 float 범위를 넘습니다.")
    if not math.isfinite(value):
        return ExecutionOutcome.fail(FailureKind.NONFINITE, f"결과가 유한하지 않음: {value}")
    return ExecutionOutcome.ok(canonical_real(value))


class ExternalSUT:
    """줄 단위 JSON 프로토콜을 말하는 외부 프로그램 하나"""

    def __init__(
        self,
        command: str | list[str],
        timeout: float = DEFAULT_TIMEOUT,
        max_line_bytes: int = MAX_LINE_BYTES,
    ) -> None:
        self.argv = (
            split_command(command) if isinstance(command, str) else list(command)
        )
        if not self.argv:
            raise ConfigError("외부 프로그램 명령이 비어 있습니다.")
        if timeout <= 0:
            raise ConfigError(f"timeout은 양수여야 합니다: {timeout}")
        self.timeout = timeout
        self.max_line_bytes = max_line_bytes
        self._proc: asyncio.subprocess.Process | None = None

    async def start(self) -> None:
        """자식 프로세스를 시작합니다."""
        try:
            self._proc = await asyncio.create_subprocess_exec(
                *self.argv,
                stdin=asyncio.subprocess.PIPE,
                stdout=asyncio.subprocess.PIPE,
                stderr=asyncio.subprocess.DEVNULL,
                limit=self.max_line_bytes,
            )
        except OSError as e:
            raise MethodLookupError(
                f"외부 프로그램을 시작할 수 없습니다: {self.argv[0]} - {e}"
            ) from e
        logger.info("외부 SUT 시작 (pid=%d): %s", self._proc.pid, " ".join(self.argv))

    async def close(self) -> None:
        """자식 프로세스를 종료합니다."""
        if self._proc is None:
            return
        proc, self._proc = self._proc, None
        if proc.returncode is None:
            if proc.stdin:
                proc.stdin.close()
            try:
                await asyncio.wait_for(proc.wait(), timeout=1.0)
            except asyncio.TimeoutError:
                proc.kill()
                await proc.wait()

    async def _restart(self) -> None:
        if self._proc is not None and self._proc.returncode is None:
            self._proc.kill()
            await self._proc.wait()
        self._proc = None
        await self.start()

    async def _read_response(self, request_id: int) -> bytes | ExecutionOutcome:
        """request_id보다 작은 id의 늦은 응답은 버리고 다음 줄을 읽습니다."""
        assert self._proc is not None and self._proc.stdout
        loop = asyncio.get_running_loop()
        deadline = loop.time() + self.timeout

        while True:
            remaining = max(deadline - loop.time(), 0.0)
            try:
                line = await asyncio.wait_for(self._proc.stdout.readline(), remaining)
            except asyncio.TimeoutError:
                logger.warning(
                    "외부 SUT 응답 시간 초과 (id=%d, %.1fs)", request_id, self.timeout
                )
                # 늦게 도착한 응답이 다음 요청과 섞이지 않도록 재시작
                await self._restart()
                return ExecutionOutcome.fail(
                    FailureKind.TIMEOUT, f"{self.timeout}초 안에 응답이 없습니다."
                )
            except ValueError as e:
                logger.warning("외부 SUT 응답 줄이 너무 김 (id=%d): %s", request_id, e)
                await self._restart()
                return _protocol_error(
                    f"응답 한 줄이 {self.max_line_bytes}바이트를 넘습니다."
                )

            if not line:
                logger.warning("외부 SUT가 응답 없이 종료됨 (id=%d)", request_id)
                await self._restart()
                return _protocol_error("프로세스가 응답 없이 종료되었습니다.")

            rid = _response_id(line)
            if rid is not None and rid < request_id:
                logger.warning("이전 요청의 응답 무시 (id=%d, 응답 id=%d)", request_id, rid)
                continue
            return line

    async def call(
        self, request_id: int, values: Sequence[Number]
    ) -> ExecutionOutcome:
        """요청 하나를 보내고 응답을 기다립니다.

        request_id는 자식 프로세스 하나에서 증가하는 값이어야 합니다.
        id가 맞지 않는 응답을 받으면 프로세스를 재시작해 다음 요청과 다시 맞춥니다.
        """
        if self._proc is None:
            await self.start()
        assert self._proc is not None and self._proc.stdin and self._proc.stdout

        request = json.dumps({"id": request_id, "input": list(values)}) + "\n"
        try:
            self._proc.stdin.write(request.encode("utf-8"))
            await self._proc.stdin.drain()
        except (BrokenPipeError, ConnectionResetError) as e:
            logger.warning("외부 SUT 파이프 끊김 (id=%d): %s", request_id, e)
            await self._restart()
            return _protocol_error(f"요청을 보낼 수 없습니다: {e}")

        line = await self._read_response(request_id)
        if isinstance(line, ExecutionOutcome):
            return line

        outcome = parse_response(line, request_id)
        if outcome.failure == FailureKind.PROTOCOL_ERROR:
            logger.warning("프로토콜 오류 (id=%d): %s", request_id, outcome.message)
            rid = _response_id(line)
            if rid is not None and rid != request_id:
                await self._restart()
        return outcome


async def run_external(
    command: str | list[str],
    mrs: list[MrSpec],
    data: list[TestDatum],
    seed: int,
    name: str = "external",
    timeout: float = DEFAULT_TIMEOUT,
) -> list[ExecutionRecord]:
    """외부 프로그램을 SUT로 삼아 MT를 실행합니다.

    기록 계약은 run_mt와 같습니다 (MR → 데이터 id 순, exec_id 0..k−1).
    프로그램을 시작할 수 없으면 MethodLookupError로 중단합니다.
    """
    if not data:
        raise ConfigError("실행할 테스트 데이터가 없습니다.")
    transformed = transform_all(mrs, data, seed)
    return await execute_external(command, mrs, data, transformed, name, timeout)


async def execute_external(
    command: str | list[str],
    mrs: list[MrSpec],
    data: list[TestDatum],
    transformed: TransformTable,
    name: str = "external",
    timeout: float = DEFAULT_TIMEOUT,
) -> list[ExecutionRecord]:
    """이미 변환된 데이터로 외부 SUT를 실행합니다."""
    sut = ExternalSUT(command, timeout=timeout)
    await sut.start()

    ordered = sorted(data, key=lambda d: d.id)
    records: list[ExecutionRecord] = []
    logger.info(
        "외부 SUT 실행 시작: %s, MR %d개 × 데이터 %d건", name, len(mrs), len(ordered)
    )

    try:
        for spec in mrs:
            for datum in ordered:
                exec_id = len(records)
                followup = transformed[datum.id][spec.id]
                source_id, followup_id = wire_ids(exec_id)
                source_outcome = await sut.call(source_id, datum.values)
                followup_outcome = (
                    await sut.call(followup_id, followup.values)
                    if followup is not None
                    else None
                )
                records.append(
                    ExecutionRecord(
                        exec_id=exec_id,
                        method=name,
                        mr=spec.id,
                        source_input=datum.values,
                        followup_input=None if followup is None else followup.values,
                        source_outcome=source_outcome,
                        followup_outcome=followup_outcome,
                    )
                )
    finally:
        await sut.close()

    logger.info("외부 SUT 실행 완료: 기록 %d건", len(records))
    return records
