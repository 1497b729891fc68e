"""프리셋 기반 종단 간 검증

rq1: 양의 정수 [1, 50], 길이 2..20
rq2: 정수 [-15, 15], 길이 0..20 (빈 리스트 포함)
"""

import json
import time

import numpy as np
import pytest

from src.analyzer.analyser import aggregate
from src.checker.mr_checker import check_all
from src.config import Settings
from src.corpus.methods import list_methods
from src.executor.runner import run_mt
from src.generator.fuzzer import generate
from src.main import main
from src.miner.features import featurize
from src.miner.rules import mine, mine_constraints, render
from src.models import Classification, MrId, VerdictStatus
from src.relations.catalog import build_catalog

SEED = 7


def _preset_config(name, count=1000, seed=SEED):
    settings = Settings()
    settings.apply_preset(name)
    settings.fuzz.count = count
    return settings.fuzz_config(seed)


def _reports(config, methods, mrs):
    data = generate(config)
    specs = build_catalog(config, mrs=mrs)
    records = run_mt(methods, specs, data, config.seed)
    verdicts = check_all(records)
    reports = aggregate(verdicts)
    return data, records, verdicts, {(r.method, r.mr): r for r in reports}


@pytest.fixture(scope="module")
def rq1():
    return _preset_config("rq1")


@pytest.fixture(scope="module")
def rq2():
    return _preset_config("rq2")


class TestRq1:
    """rq1 데이터에서의 결정적 결과"""

    def test_durbin_watson_add_is_violated(self, rq1):
        """durbinWatson × MR_ADD: 상수 리스트가 아니면 항상 위반"""
        started = time.monotonic()
        data, _, _, reports = _reports(rq1, ["durbinWatson"], [MrId.ADD])
        elapsed = time.monotonic() - started

        report = reports["durbinWatson", MrId.ADD]
        # 상수 리스트는 원본과 후속 모두 0이므로 비위반
        varying = sum(1 for d in data if len(set(d.values)) > 1)
        assert report.n_violation == varying
        assert report.n_nonviolation == len(data) - varying
        assert report.n_invalid == 0
        if varying == len(data):
            assert report.pct_violation == 100.0
            assert report.classification == Classification.NOT_APPLICABLE
        assert elapsed < 5

    def test_permutation_invariant_methods_hold_per(self, rq1):
        """순서 불변 메서드 × MR_PER은 위반 0"""
        invariant = [m.name for m in list_methods() if m.permutation_invariant]
        _, _, _, reports = _reports(rq1, invariant, [MrId.PER])
        for name in invariant:
            report = reports[name, MrId.PER]
            assert report.pct_violation == 0.0, name
            if report.n_invalid == 0:
                assert report.pct_nonviolation == 100.0, name
                assert report.classification == Classification.APPLICABLE, name

    def test_per_applicable_for_total_methods(self, rq1):
        """정의역 제약이 없는 메서드는 rq1에서 MR_PER APPLICABLE"""
        methods = ["average", "median", "add_values", "geometric_mean"]
        _, _, _, reports = _reports(rq1, methods, [MrId.PER])
        for name in methods:
            assert reports[name, MrId.PER].classification == Classification.APPLICABLE

    def test_monotone_methods(self, rq1):
        """(average, MR_ADD)와 (add_values, MR_MUL)은 APPLICABLE"""
        _, _, _, reports = _reports(
            rq1, ["average", "add_values"], [MrId.ADD, MrId.MUL]
        )
        for key in (("average", MrId.ADD), ("add_values", MrId.MUL)):
            assert reports[key].pct_nonviolation == 100.0
            assert reports[key].classification == Classification.APPLICABLE

    def test_kurtosis_inc_is_mixed(self, rq1):
        """(kurtosis, MR_INC)는 혼합, 위반 비율은 30~70%"""
        _, _, _, reports = _reports(rq1, ["kurtosis"], [MrId.INC])
        report = reports["kurtosis", MrId.INC]
        assert report.classification == Classification.MIXED
        assert 30.0 <= report.pct_violation <= 70.0


def _invalid_oracle(samples=100_000, seed=12345):
    """geometric_mean 무효 비율의 몬테카를로 추정 (rq2 분포)"""
    rng = np.random.default_rng(seed)
    lengths = rng.integers(0, 20, size=samples, endpoint=True)
    valid = 0
    for length in lengths:
        if length and (rng.integers(-15, 15, size=length, endpoint=True) > 0).all():
            valid += 1
    return 100.0 * (1 - valid / samples)


class TestRq2:
    """rq2 데이터에서 무효 데이터 집계"""

    def test_oracle_agrees_with_closed_form(self):
        """몬테카를로 추정과 해석적 기댓값이 일치"""
        ratio = 15 / 31
        expected = 100.0 * (1 - sum(ratio**n for n in range(1, 21)) / 21)
        assert _invalid_oracle() == pytest.approx(expected, abs=0.5)

    def test_geometric_mean_invalid_share(self, rq2):
        """geometric_mean은 위반 0, 무효 비율은 기댓값 ±5%p"""
        expected = _invalid_oracle()
        mrs = [MrId.ADD, MrId.MUL, MrId.PER]
        _, _, _, reports = _reports(rq2, ["geometric_mean"], [*mrs, MrId.INV])
        for mr in mrs:
            report = reports["geometric_mean", mr]
            assert report.pct_violation == 0.0, mr
            assert abs(report.pct_invalid - expected) <= 5.0, mr
            assert report.classification == Classification.MIXED
        inverted = reports["geometric_mean", MrId.INV]
        assert inverted.pct_invalid == 100.0

    def test_invalid_constraint_is_mined(self, rq2):
        """무효 데이터를 가르는 제약을 찾음"""
        _, records, verdicts, reports = _reports(
            rq2, ["geometric_mean"], [MrId.ADD]
        )
        constraints = mine_constraints(
            records, verdicts, list(reports.values()), min_support=5
        )
        rules = constraints["geometric_mean", MrId.ADD]
        assert rules[0].predicted_status == VerdictStatus.INVALID
        assert rules[0].precision == 1.0
        sentence = render(rules[0], "geometric_mean", MrId.ADD)
        assert sentence.startswith("geometric_mean yields invalid data under MR_ADD")


class TestConstraintRecovery:
    """합성 시행에서 심어 둔 규칙 복원"""

    def test_negative_values_predict_violation(self):
        """음수 포함 ⇔ 위반인 500건에서 has_negative → VIOLATION"""
        rng = np.random.default_rng(SEED)
        trials = []
        for i in range(500):
            length = int(rng.integers(1, 21))
            values = [int(v) for v in rng.integers(1, 51, size=length)]
            if i % 2:
                values[int(rng.integers(0, len(values)))] = -int(rng.integers(1, 16))
            status = (
                VerdictStatus.VIOLATION
                if any(v < 0 for v in values)
                else VerdictStatus.NON_VIOLATION
            )
            trials.append((featurize(values), status))

        rule = mine(trials)[0]
        assert rule.text == "has_negative → VIOLATION"
        assert (rule.precision, rule.recall) == (1.0, 1.0)

    def test_empty_lists_predict_invalid(self):
        """빈 리스트 ⇔ 무효인 시행에서 is_empty → INVALID"""
        rng = np.random.default_rng(SEED)
        trials = []
        for _ in range(300):
            length = int(rng.integers(0, 6))
            values = [int(v) for v in rng.integers(-15, 16, size=length)]
            status = (
                VerdictStatus.INVALID if not values else VerdictStatus.NON_VIOLATION
            )
            trials.append((featurize(values), status))

        rules = mine(trials)
        assert any(r.text == "is_empty → INVALID" for r in rules)
        invalid = [r for r in rules if r.predicted_status == VerdictStatus.INVALID]
        top_invalid = invalid[0]
        assert (top_invalid.precision, top_invalid.recall) == (1.0, 1.0)


class TestReproducibility:
    """전체 파이프라인 재현성"""

    def test_rq1_pipeline_is_reproducible(self, tmp_path, monkeypatch):
        """같은 시드, 다른 작업자 수로 같은 분석 결과"""
        monkeypatch.chdir(tmp_path)
        base = ["pipeline", "--preset", "rq1", "--seed", "7", "--count", "200"]
        argv = [*base, "--methods", "average,kurtosis,durbinWatson,geometric_mean"]
        assert main([*argv, "--jobs", "1", "-o", "a"]) == 0
        assert main([*argv, "--jobs", "1", "-o", "b"]) == 0
        assert main([*argv, "--jobs", "8", "-o", "c"]) == 0

        def normalized(name):
            doc = json.loads((tmp_path / name / "analysis.json").read_text())
            doc["manifest"]["started_at"] = doc["manifest"]["finished_at"] = ""
            return doc

        assert normalized("a") == normalized("b") == normalized("c")
