"""제약 마이닝 테스트"""

import numpy as np
import pytest

from src.analyzer.analyser import aggregate
from src.miner.features import BOOLEAN_FEATURES, NUMERIC_FEATURES, featurize
from src.miner.rules import candidate_atoms, mine, mine_constraints, render
from src.models import (
    Atom,
    ConstraintRule,
    ExecutionOutcome,
    ExecutionRecord,
    MrId,
    Verdict,
    VerdictStatus,
)

NV = VerdictStatus.NON_VIOLATION
V = VerdictStatus.VIOLATION
INV = VerdictStatus.INVALID


def _signed_inputs(seed=0, n=120):
    """0이 없는 입력. 절반은 음수를 포함"""
    rng = np.random.default_rng(seed)
    inputs = []
    for i in range(n):
        length = int(rng.integers(2, 8))
        values = [int(v) for v in rng.integers(1, 51, size=length)]
        if i % 2:
            values[int(rng.integers(0, length))] = -int(rng.integers(1, 16))
        inputs.append(values)
    return inputs


class TestFeaturize:
    """featurize 테스트"""

    def test_example(self):
        """대표 입력의 특징"""
        f = featurize([3, -1, 3, 0])
        assert (f.length, f.min_val, f.max_val, f.sum_val) == (4, -1, 3, 5)
        assert f.has_negative and f.has_zero and f.has_duplicates
        assert not f.all_positive and not f.is_sorted and not f.is_empty

    def test_empty(self):
        """빈 리스트"""
        f = featurize([])
        assert f.is_empty and f.is_sorted and not f.all_positive
        assert (f.length, f.min_val, f.max_val, f.sum_val) == (0, None, None, None)

    def test_sorted_is_non_decreasing(self):
        """같은 값이 이어져도 정렬된 것으로 봄"""
        assert featurize([1, 1, 2]).is_sorted
        assert featurize([5]).is_sorted

    def test_float_sum_is_canonical(self):
        """실수 합은 유효숫자 9자리"""
        assert featurize([0.1, 0.2]).sum_val == 0.3

    def test_feature_names_cover_dataclass(self):
        """특징 이름이 DataFeatures 필드와 일치"""
        names = set(BOOLEAN_FEATURES) | set(NUMERIC_FEATURES)
        assert names == set(vars(featurize([1])))


class TestCandidateAtoms:
    """candidate_atoms 테스트"""

    def test_thresholds_are_observed_values(self):
        """임계값은 관측된 값"""
        features = [featurize(v) for v in ([1, 2], [3], [1, 2, 3])]
        atoms = candidate_atoms(features)
        thresholds = {a.threshold for a, _ in atoms if a.feature == "length"}
        assert thresholds <= {1, 2, 3}

    def test_every_observed_value_is_a_threshold(self):
        """관측값이 많아도 모두 임계값 후보"""
        features = [featurize([i]) for i in range(200)]
        atoms = candidate_atoms(features)
        at_least = {
            a.threshold for a, _ in atoms if a.feature == "min_val" and a.op == ">="
        }
        assert at_least == set(range(200))

    def test_only_satisfiable_atoms(self):
        """아무 시행도 만족하지 않는 원자는 제외"""
        features = [featurize([1, 2]), featurize([3, 4])]
        for _, mask in candidate_atoms(features):
            assert mask.any()


class TestMine:
    """mine 테스트"""

    def test_planted_negative_rule(self):
        """음수가 있으면 위반, 없으면 비위반"""
        trials = [
            (featurize(v), V if any(x < 0 for x in v) else NV) for v in _signed_inputs()
        ]
        rules = mine(trials, min_precision=0.95, min_support=5)
        assert rules[0].text == "has_negative → VIOLATION"
        assert (rules[0].precision, rules[0].recall) == (1.0, 1.0)
        texts = [r.text for r in rules]
        assert "all_positive → NON_VIOLATION" in texts
        assert texts.index("has_negative → VIOLATION") < texts.index(
            "all_positive → NON_VIOLATION"
        )

    def test_planted_empty_rule(self):
        """빈 리스트는 무효"""
        inputs = [[]] * 10 + [[i, i + 1] for i in range(1, 21)]
        trials = [(featurize(v), INV if not v else NV) for v in inputs]
        texts = [r.text for r in mine(trials, min_support=5)]
        assert "is_empty → INVALID" in texts
        assert "not is_empty → NON_VIOLATION" in texts

    def test_planted_threshold_rule(self):
        """길이 1이면 무효"""
        inputs = [[i] for i in range(1, 11)] + [[i, 2, 3] for i in range(1, 21)]
        trials = [(featurize(v), INV if len(v) < 2 else NV) for v in inputs]
        texts = [r.text for r in mine(trials, min_support=5)]
        assert "length < 2 → INVALID" in texts or "length < 3 → INVALID" in texts

    def test_degenerate(self):
        """판정이 하나뿐이면 true 규칙"""
        trials = [(featurize([i, i + 1]), NV) for i in range(7)]
        assert mine(trials) == [ConstraintRule((), NV, 7, 1.0, 1.0)]

    def test_invalid_arguments(self):
        """빈 입력이나 잘못된 min_precision은 ValueError"""
        with pytest.raises(ValueError):
            mine([])
        with pytest.raises(ValueError):
            mine([(featurize([1]), NV)], min_precision=0)

    def test_deterministic(self):
        """같은 입력은 같은 규칙 목록"""
        trials = [
            (featurize(v), V if v[0] > 25 else NV) for v in _signed_inputs(seed=3)
        ]
        assert mine(trials) == mine(trials)

    def test_thresholds_respected(self):
        """모든 규칙이 min_precision과 min_support를 만족"""
        trials = [
            (featurize(v), V if sum(v) > 80 else NV) for v in _signed_inputs(seed=5)
        ]
        for rule in mine(trials, min_precision=0.9, min_support=8):
            assert rule.precision >= 0.9
            assert rule.support >= 8

    def test_brute_force_recount(self):
        """보고된 support/precision/recall은 직접 센 값과 같음"""
        inputs = _signed_inputs(seed=7, n=60)
        trials = [(featurize(v), V if len(v) > 4 else NV) for v in inputs]
        n_status = {s: sum(1 for _, t in trials if t == s) for s in (NV, V)}
        for rule in mine(trials, min_precision=0.8, min_support=3):
            covered = [t for f, t in trials if rule.applies(f)]
            hits = sum(1 for t in covered if t == rule.predicted_status)
            assert rule.support == len(covered)
            assert rule.precision == pytest.approx(hits / len(covered), rel=1e-8)
            assert rule.recall == pytest.approx(
                hits / n_status[rule.predicted_status], rel=1e-8
            )

    def test_conjunction_uses_distinct_features(self):
        """논리곱의 두 원자는 서로 다른 특징"""
        inputs = _signed_inputs(seed=11, n=80)
        trials = [
            (featurize(v), V if any(x < 0 for x in v) and len(v) > 3 else NV)
            for v in inputs
        ]
        rules = mine(trials, min_precision=1.0, min_support=3)
        conjunctions = [r for r in rules if len(r.predicate) == 2]
        assert conjunctions
        for rule in conjunctions:
            assert rule.predicate[0].feature != rule.predicate[1].feature

    def test_lower_precision_only_adds_rules(self):
        """min_precision을 낮추면 규칙 집합은 커지기만 함"""
        trials = [
            (featurize(v), V if v[-1] % 3 == 0 else NV) for v in _signed_inputs(seed=2)
        ]
        strict = {r.text for r in mine(trials, min_precision=0.9, min_support=3)}
        loose = {r.text for r in mine(trials, min_precision=0.6, min_support=3)}
        assert strict <= loose

    @pytest.mark.parametrize("n", [64, 72, 120, 400])
    def test_cut_between_many_distinct_values(self, n):
        """서로 다른 값이 많아도 정확한 경계를 찾음"""
        trials = [(featurize([i]), V if i < 50 else NV) for i in range(1, n + 1)]
        texts = [r.text for r in mine(trials, min_precision=1.0, min_support=5)]
        assert "min_val < 50 → VIOLATION" in texts
        assert "min_val >= 50 → NON_VIOLATION" in texts

    def test_conjunction_cut_between_many_distinct_values(self):
        """논리곱의 임계값도 모든 관측값에서 고름"""
        inputs = [[i] * (2 + i % 2) for i in range(1, 201)]
        trials = [
            (featurize(v), V if v[0] < 101 and len(v) == 3 else NV) for v in inputs
        ]
        texts = [r.text for r in mine(trials, min_precision=1.0, min_support=5)]
        assert "length >= 3 and min_val < 101 → VIOLATION" in texts

    def test_consistent_trial_keeps_perfect_rules(self):
        """완벽한 규칙과 일치하는 시행을 더해도 그 규칙은 남음"""
        inputs = _signed_inputs(seed=17, n=150)
        trials = [
            (featurize(v), V if sum(v) < 60 and len(v) > 2 else NV) for v in inputs
        ]
        before = mine(trials, min_precision=1.0, min_support=3)
        assert before

        for rule in before[:25]:
            extra = next(
                (f, s)
                for f, s in trials
                if s == rule.predicted_status and rule.applies(f)
            )
            after = {r.text for r in mine([*trials, extra], 1.0, 3)}
            assert rule.text in after

    def test_limit_keeps_head_of_full_list(self):
        """limit은 전체 목록의 앞부분과 같음"""
        trials = [
            (featurize(v), V if v[0] % 2 else NV) for v in _signed_inputs(seed=9)
        ]
        full = mine(trials, min_precision=0.5, min_support=3)
        for limit in (1, 3, 10):
            assert mine(trials, 0.5, 3, limit=limit) == full[:limit]

    def test_invalid_limit(self):
        """limit이 1 미만이면 ValueError"""
        trials = [(featurize([1]), NV), (featurize([-1]), V)]
        with pytest.raises(ValueError):
            mine(trials, limit=0)

    def test_sorted(self):
        """precision, recall 내림차순"""
        trials = [
            (featurize(v), V if v[0] % 2 else NV) for v in _signed_inputs(seed=9)
        ]
        rules = mine(trials, min_precision=0.5, min_support=3)
        keys = [(-r.precision, -r.recall, len(r.predicate)) for r in rules]
        assert keys == sorted(keys)


class TestRender:
    """render 테스트"""

    @pytest.mark.parametrize(
        "status, expected",
        [
            (NV, "MR_ADD applies to average when has_negative"),
            (V, "MR_ADD is violated by average when has_negative"),
            (INV, "average yields invalid data under MR_ADD when has_negative"),
        ],
    )
    def test_sentences(self, status, expected):
        """판정별 문장"""
        rule = ConstraintRule((Atom("has_negative", "is"),), status, 5, 1.0, 1.0)
        assert render(rule, "average", MrId.ADD) == expected

    def test_true_predicate(self):
        """빈 술어는 모든 입력"""
        rule = ConstraintRule((), NV, 5, 1.0, 1.0)
        expected = "MR_PER applies to median for all inputs"
        assert render(rule, "median", MrId.PER) == expected


class TestMineConstraints:
    """mine_constraints 테스트"""

    def _records(self, inputs, method="m", mr=MrId.ADD, start=0):
        return [
            ExecutionRecord(
                exec_id=start + i,
                method=method,
                mr=mr,
                source_input=tuple(values),
                followup_input=tuple(values),
                source_outcome=ExecutionOutcome.ok(1.0),
                followup_outcome=ExecutionOutcome.ok(1.0),
            )
            for i, values in enumerate(inputs)
        ]

    def test_only_mixed_pairs(self):
        """혼합 쌍만 마이닝, 규칙 수는 top_k 이하"""
        inputs = _signed_inputs(n=40)
        mixed_records = self._records(inputs, mr=MrId.ADD)
        clean_records = self._records(inputs, mr=MrId.PER, start=len(inputs))
        verdicts = [
            Verdict(r.exec_id, r.method, r.mr, V if min(r.source_input) < 0 else NV)
            for r in mixed_records
        ] + [Verdict(r.exec_id, r.method, r.mr, NV) for r in clean_records]
        reports = aggregate(verdicts)

        constraints = mine_constraints(
            mixed_records + clean_records, verdicts, reports, top_k=2
        )
        assert list(constraints) == [("m", MrId.ADD)]
        rules = constraints["m", MrId.ADD]
        assert 1 <= len(rules) <= 2
        assert rules[0].text == "has_negative → VIOLATION"

    def test_independent_of_record_order(self):
        """기록 순서와 무관"""
        inputs = _signed_inputs(n=30)
        records = self._records(inputs)
        verdicts = [
            Verdict(r.exec_id, r.method, r.mr, V if len(r.source_input) > 4 else NV)
            for r in records
        ]
        reports = aggregate(verdicts)
        forward = mine_constraints(records, verdicts, reports)
        backward = mine_constraints(records[::-1], verdicts[::-1], reports)
        assert forward == backward


def test_every_atom_pair_is_scored_once():
    """같은 (술어, 판정) 규칙은 한 번만 나옴"""
    trials = [
        (featurize(v), V if v[0] > 20 else NV) for v in _signed_inputs(seed=13, n=50)
    ]
    rules = mine(trials, min_precision=0.5, min_support=2)
    keys = [(r.predicate, r.predicted_status) for r in rules]
    assert len(keys) == len(set(keys))
