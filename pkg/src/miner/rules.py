"""MR 제약 마이닝 - 혼합 (메서드, MR) 쌍에서 판정을 가르는 술어를 찾는다

가설 공간은 고정된 특징 집합 위의 원자 술어와 깊이 2 논리곱이다.

- 불리언 원자: ``has_negative``, ``not has_zero`` ...
- 임계값 원자: ``length < 2``, ``min_val >= 0`` (임계값은 관측된 특징 값 전부)
- 논리곱: 서로 다른 특징의 원자 두 개 (같은 특징의 구간은 만들지 않음)

특징 값을 순위로 바꾼 뒤 판정별 누적 히스토그램을 만들면 임계값 하나,
또는 두 특징의 임계값 쌍마다 만족 수와 적중 수를 바로 읽을 수 있다.
임계값을 추리지 않고 모든 후보를 점수화한다.

min_precision, min_support를 넘는 규칙을 (precision, recall, 단순성)
내림차순으로 정렬한다. 동점이면 위반/무효를 예측하는 규칙을 먼저 두고,
마지막으로 술어 문자열 사전순으로 정렬한다.
"""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from src.logger import get_logger
from src.miner.features import BOOLEAN_FEATURES, NUMERIC_FEATURES, featurize
from src.models import (
    Atom,
    Classification,
    ConstraintRule,
    DataFeatures,
    ExecutionRecord,
    MethodMrReport,
    MrId,
    Verdict,
    VerdictStatus,
)
from src.numeric import canonical_real

logger = get_logger("miner")

DEFAULT_MIN_PRECISION = 0.95
DEFAULT_MIN_SUPPORT = 5

Trial = tuple[DataFeatures, VerdictStatus]

_STATUSES = list(VerdictStatus)
_STATUS_RANK = {
    VerdictStatus.VIOLATION: 0,
    VerdictStatus.INVALID: 1,
    VerdictStatus.NON_VIOLATION: 2,
}
_RANK_OF = np.array([_STATUS_RANK[s] for s in _STATUSES])

# 아래쪽 구간 (<, not) / 위쪽 구간 (>=, is)
LOWER, UPPER = 0, 1


def _as_number(value: float) -> int | float:
    return int(value) if float(value).is_integer() else canonical_real(value)


# ──────────────────────────────────────────────
# 특징 열
# ──────────────────────────────────────────────


@dataclass(frozen=True)
class _Column:
    """특징 하나를 순위로 표현한 열. 값이 없는 시행의 순위는 -1"""

    name: str
    levels: np.ndarray
    ranks: np.ndarray
    cuts: np.ndarray
    boolean: bool = False

    @property
    def size(self) -> int:
        return len(self.levels)

    def atom(self, side: int, cut: int) -> Atom:
        if self.boolean:
            return Atom(self.name, "is" if side == UPPER else "not")
        op = ">=" if side == UPPER else "<"
        return Atom(self.name, op, _as_number(self.levels[cut]))

    def mask(self, side: int, cut: int) -> np.ndarray:
        if side == UPPER:
            return self.ranks >= cut
        return (self.ranks >= 0) & (self.ranks < cut)


def _columns(features: Sequence[DataFeatures]) -> list[_Column]:
    columns: list[_Column] = []

    for name in BOOLEAN_FEATURES:
        ranks = np.array([int(bool(getattr(f, name))) for f in features])
        columns.append(
            _Column(name, np.array([0.0, 1.0]), ranks, np.array([1]), boolean=True)
        )

    for name in NUMERIC_FEATURES:
        raw = [getattr(f, name) for f in features]
        values = np.array([np.nan if v is None else float(v) for v in raw])
        present = ~np.isnan(values)
        levels = np.unique(values[present])
        ranks = np.full(len(values), -1)
        ranks[present] = np.searchsorted(levels, values[present])
        columns.append(_Column(name, levels, ranks, np.arange(len(levels))))

    return columns


def candidate_atoms(features: Sequence[DataFeatures]) -> list[tuple[Atom, np.ndarray]]:
    """관측된 특징에서 원자 술어와 그 참/거짓 마스크를 만듭니다."""
    atoms: list[tuple[Atom, np.ndarray]] = []
    for column in _columns(features):
        for cut in column.cuts:
            for side in (LOWER, UPPER):
                atoms.append((column.atom(side, cut), column.mask(side, cut)))
    return [(atom, mask) for atom, mask in atoms if mask.any()]


# ──────────────────────────────────────────────
# 누적 히스토그램
# ──────────────────────────────────────────────


def _side_counts(
    column: _Column, onehot: np.ndarray
) -> Iterator[tuple[tuple[int], np.ndarray]]:
    """임계값마다 아래/위 구간의 판정별 시행 수 (len(cuts), 판정 수)"""
    seen = column.ranks >= 0
    hist = np.zeros((column.size, onehot.shape[1]), dtype=np.int64)
    np.add.at(hist, column.ranks[seen], onehot[seen])

    below = np.zeros((column.size + 1, onehot.shape[1]), dtype=np.int64)
    below[1:] = hist.cumsum(axis=0)

    lower = below[column.cuts]
    yield (LOWER,), lower
    yield (UPPER,), below[-1] - lower


def _quadrant_counts(
    a: _Column, b: _Column, onehot: np.ndarray
) -> Iterator[tuple[tuple[int, int], np.ndarray]]:
    """임계값 쌍마다 네 사분면의 판정별 시행 수 (len(a.cuts), len(b.cuts), 판정 수)"""
    seen = (a.ranks >= 0) & (b.ranks >= 0)
    hist = np.zeros((a.size, b.size, onehot.shape[1]), dtype=np.int64)
    np.add.at(hist, (a.ranks[seen], b.ranks[seen]), onehot[seen])

    below = np.zeros((a.size + 1, b.size + 1, onehot.shape[1]), dtype=np.int64)
    below[1:, 1:] = hist.cumsum(axis=0).cumsum(axis=1)

    lower_lower = below[np.ix_(a.cuts, b.cuts)]
    lower_any = below[a.cuts, -1][:, None, :]
    any_lower = below[-1, b.cuts][None, :, :]
    total = below[-1, -1]

    yield (LOWER, LOWER), lower_lower
    yield (LOWER, UPPER), lower_any - lower_lower
    yield (UPPER, LOWER), any_lower - lower_lower
    yield (UPPER, UPPER), total - lower_any - any_lower + lower_lower


# ──────────────────────────────────────────────
# 후보 수집
# ──────────────────────────────────────────────


@dataclass
class _Block:
    """같은 특징 조합에서 기준을 넘은 후보들"""

    columns: tuple[_Column, ...]
    sides: tuple[int, ...]
    cuts: np.ndarray
    status: np.ndarray
    support: np.ndarray
    hits: np.ndarray

    def predicate(self, row: int) -> tuple[Atom, ...]:
        return tuple(
            column.atom(side, int(column.cuts[self.cuts[row, d]]))
            for d, (column, side) in enumerate(zip(self.columns, self.sides))
        )


def _harvest(
    columns: tuple[_Column, ...],
    sides: tuple[int, ...],
    counts: np.ndarray,
    min_precision: float,
    min_support: int,
) -> _Block | None:
    support = counts.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        passing = (
            (support[..., None] >= min_support)
            & (counts > 0)
            & (counts / support[..., None] >= min_precision)
        )
    *positions, status = np.nonzero(passing)
    if not len(status):
        return None
    return _Block(
        columns=columns,
        sides=sides,
        cuts=np.stack(positions, axis=1),
        status=status,
        support=support[tuple(positions)],
        hits=counts[(*positions, status)],
    )


def _sort_key(rule: ConstraintRule) -> tuple:
    return (
        -rule.precision,
        -rule.recall,
        len(rule.predicate),
        _STATUS_RANK[rule.predicted_status],
        rule.predicate_text,
    )


def _make_rule(
    predicate: tuple[Atom, ...],
    status: VerdictStatus,
    support: int,
    hits: int,
    n_status: int,
) -> ConstraintRule:
    return ConstraintRule(
        predicate=predicate,
        predicted_status=status,
        support=support,
        precision=canonical_real(hits / support),
        recall=canonical_real(hits / n_status),
    )


def _shortlist(blocks: list[_Block], n_status: np.ndarray, limit: int) -> np.ndarray:
    """수치 키로 상위 limit개와 그 동점 후보만 남깁니다 (전역 인덱스)."""
    status = np.concatenate([b.status for b in blocks])
    hits = np.concatenate([b.hits for b in blocks])
    precision = hits / np.concatenate([b.support for b in blocks])
    recall = hits / n_status[status]
    depth = np.concatenate([np.full(len(b.status), len(b.columns)) for b in blocks])
    rank = _RANK_OF[status]

    if len(status) <= limit:
        return np.arange(len(status))

    order = np.lexsort((rank, depth, -recall, -precision))
    c = order[limit - 1]
    worse = (precision < precision[c]) | (
        (precision == precision[c])
        & (
            (recall < recall[c])
            | (
                (recall == recall[c])
                & ((depth > depth[c]) | ((depth == depth[c]) & (rank > rank[c])))
            )
        )
    )
    return np.nonzero(~worse)[0]


def mine(
    trials: Sequence[Trial],
    min_precision: float = DEFAULT_MIN_PRECISION,
    min_support: int = DEFAULT_MIN_SUPPORT,
    limit: int | None = None,
) -> list[ConstraintRule]:
    """라벨이 붙은 시행에서 제약 규칙을 찾습니다.

    support는 술어를 만족하는 시행 수, precision은 그중 예측 판정과 같은
    비율, recall은 해당 판정 시행 중 술어를 만족하는 비율입니다.
    모든 시행의 판정이 같으면 ``true → 판정`` 규칙 하나를 반환합니다.

    Args:
        limit: 앞에서부터 이만큼만 반환 (None이면 전부)
    """
    if not trials:
        raise ValueError("마이닝할 시행이 없습니다.")
    if not 0 < min_precision <= 1:
        raise ValueError(f"min_precision은 (0, 1] 범위여야 합니다: {min_precision}")
    if limit is not None and limit < 1:
        raise ValueError(f"limit은 1 이상이어야 합니다: {limit}")

    labels = np.array([_STATUSES.index(s) for _, s in trials])
    present = sorted(set(labels.tolist()))

    if len(present) == 1:
        status = _STATUSES[present[0]]
        return [ConstraintRule((), status, len(trials), 1.0, 1.0)]

    columns = _columns([f for f, _ in trials])
    onehot = np.stack([labels == k for k in range(len(_STATUSES))], axis=1).astype(
        np.int64
    )
    n_status = onehot.sum(axis=0)
    min_support = max(1, min_support)

    blocks: list[_Block] = []
    for column in columns:
        for sides, counts in _side_counts(column, onehot):
            block = _harvest((column,), sides, counts, min_precision, min_support)
            if block:
                blocks.append(block)
    for a, b in combinations(columns, 2):
        for sides, counts in _quadrant_counts(a, b, onehot):
            block = _harvest((a, b), sides, counts, min_precision, min_support)
            if block:
                blocks.append(block)

    if not blocks:
        logger.debug("특징 %d개, 규칙 없음", len(columns))
        return []

    chosen = (
        _shortlist(blocks, n_status, limit)
        if limit is not None
        else np.arange(sum(len(b.status) for b in blocks))
    )
    starts = np.cumsum([0] + [len(b.status) for b in blocks])
    owner = np.searchsorted(starts, chosen, side="right") - 1

    rules: list[ConstraintRule] = []
    for index, block_no in zip(chosen.tolist(), owner.tolist()):
        block = blocks[block_no]
        row = index - int(starts[block_no])
        k = int(block.status[row])
        rules.append(
            _make_rule(
                block.predicate(row),
                _STATUSES[k],
                int(block.support[row]),
                int(block.hits[row]),
                int(n_status[k]),
            )
        )

    rules.sort(key=_sort_key)
    logger.debug("특징 %d개, 규칙 후보 %d개", len(columns), int(starts[-1]))
    return rules if limit is None else rules[:limit]


def render(rule: ConstraintRule, method: str, mr: MrId) -> str:
    """규칙을 사람이 읽을 수 있는 문장으로 만듭니다."""
    when = (
        "for all inputs" if not rule.predicate else f"when {rule.predicate_text}"
    )
    match rule.predicted_status:
        case VerdictStatus.NON_VIOLATION:
            return f"{mr.value} applies to {method} {when}"
        case VerdictStatus.VIOLATION:
            return f"{mr.value} is violated by {method} {when}"
        case VerdictStatus.INVALID:
            return f"{method} yields invalid data under {mr.value} {when}"
    raise ValueError(f"알 수 없는 판정: {rule.predicted_status}")


def mine_constraints(
    records: Sequence[ExecutionRecord],
    verdicts: Sequence[Verdict],
    reports: Sequence[MethodMrReport],
    min_precision: float = DEFAULT_MIN_PRECISION,
    min_support: int = DEFAULT_MIN_SUPPORT,
    top_k: int = 3,
) -> dict[tuple[str, MrId], list[ConstraintRule]]:
    """혼합 쌍마다 원본 입력 특징으로 규칙을 마이닝해 상위 top_k개를 반환합니다."""
    mixed = {
        (r.method, r.mr)
        for r in reports
        if r.classification == Classification.MIXED
    }
    status_of = {(v.method, v.exec_id): v.status for v in verdicts}

    trials: dict[tuple[str, MrId], list[Trial]] = {}
    for record in records:
        key = (record.method, record.mr)
        if key not in mixed:
            continue
        status = status_of.get((record.method, record.exec_id))
        if status is None:
            continue
        trials.setdefault(key, []).append((featurize(record.source_input), status))

    constraints: dict[tuple[str, MrId], list[ConstraintRule]] = {}
    for key in sorted(trials, key=lambda k: (k[0], list(MrId).index(k[1]))):
        rules = mine(trials[key], min_precision, min_support, limit=max(1, top_k))
        constraints[key] = rules[:top_k]
        if rules:
            logger.info(
                "제약 발견 %s × %s: %s",
                key[0],
                key[1].value,
                render(rules[0], key[0], key[1]),
            )
        else:
            logger.info("제약 없음 %s × %s", key[0], key[1].value)

    logger.info("제약 마이닝 완료: 혼합 %d쌍", len(constraints))
    return constraints
