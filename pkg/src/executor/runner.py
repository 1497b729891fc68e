"""MT 실행기 - (메서드, MR, 데이터)마다 원본/후속 입력을 실행하고 기록"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor

from src.corpus.methods import evaluate, resolve_methods
from src.errors import ConfigError
from src.logger import get_logger
from src.models import (
    ExecutionOutcome,
    ExecutionRecord,
    MrSpec,
    TestDatum,
    TransformedDatum,
    TransformTable,
)
from src.numeric import Number
from src.relations.catalog import transform_all

logger = get_logger("executor")

Evaluator = Callable[[str, Sequence[Number]], ExecutionOutcome]

# exec_id 없이 실행 결과만 담은 중간 형태
_Trial = tuple[
    TestDatum, TransformedDatum | None, ExecutionOutcome, ExecutionOutcome | None
]


class MTRunner:
    """내장 코퍼스에 대한 MT 실행기

    병렬 단위는 (메서드, MR) 쌍이며, 결과는 메서드 → MR → 데이터 id 순으로
    병합된다. 작업자 수와 무관하게 결과가 같다.
    """

    def __init__(
        self,
        methods: list[str],
        specs: list[MrSpec],
        jobs: int = 1,
        evaluator: Evaluator = evaluate,
    ) -> None:
        self.methods = resolve_methods(methods)
        self.specs = specs
        self.jobs = max(1, jobs)
        self._evaluate = evaluator

    def _run_pair(
        self,
        method: str,
        spec: MrSpec,
        data: list[TestDatum],
        transformed: TransformTable,
    ) -> list[_Trial]:
        trials: list[_Trial] = []
        for datum in data:
            source_outcome = self._evaluate(method, datum.values)
            followup = transformed[datum.id][spec.id]
            followup_outcome = (
                self._evaluate(method, followup.values)
                if followup is not None
                else None
            )
            trials.append((datum, followup, source_outcome, followup_outcome))
        logger.debug("%s × %s: %d건 실행", method, spec.id.value, len(trials))
        return trials

    def execute(
        self, data: list[TestDatum], transformed: TransformTable
    ) -> list[ExecutionRecord]:
        """변환 결과를 받아 모든 (메서드, MR, 데이터)를 실행합니다."""
        if not data:
            raise ConfigError("실행할 테스트 데이터가 없습니다.")

        ordered = sorted(data, key=lambda d: d.id)
        pairs = [(method, spec) for method in self.methods for spec in self.specs]

        logger.info(
            "MT 실행 시작: 메서드 %d개 × MR %d개 × 데이터 %d건 (jobs=%d)",
            len(self.methods),
            len(self.specs),
            len(ordered),
            self.jobs,
        )

        with ThreadPoolExecutor(max_workers=self.jobs) as pool:
            results = list(
                pool.map(
                    lambda pair: self._run_pair(pair[0], pair[1], ordered, transformed),
                    pairs,
                )
            )

        records: list[ExecutionRecord] = []
        for (method, spec), trials in zip(pairs, results):
            for datum, followup, source_outcome, followup_outcome in trials:
                records.append(
                    ExecutionRecord(
                        exec_id=len(records),
                        method=method,
                        mr=spec.id,
                        source_input=datum.values,
                        followup_input=None if followup is None else followup.values,
                        source_outcome=source_outcome,
                        followup_outcome=followup_outcome,
                    )
                )

        logger.info("MT 실행 완료: 기록 %d건", len(records))
        return records


def run_mt(
    methods: list[str],
    mrs: list[MrSpec],
    data: list[TestDatum],
    seed: int,
    jobs: int = 1,
) -> list[ExecutionRecord]:
    """변환부터 실행까지 한 번에 수행합니다.

    메서드 이름은 실행 전에 모두 검증하며, 하나라도 없으면 MethodLookupError로
    중단합니다. 결과는 |methods|·|mrs|·|data|건입니다.
    """
    runner = MTRunner(methods, mrs, jobs=jobs)
    if not data:
        raise ConfigError("실행할 테스트 데이터가 없습니다.")
    transformed = transform_all(mrs, data, seed)
    return runner.execute(data, transformed)
