"""퍼저 및 난수 스트림 테스트"""

import numpy as np

from src.generator.fuzzer import Fuzzer, draw_elements, generate
from src.generator.rng import derive_stream, label_key, transform_stream
from src.models import CountBudget, DurationBudget, FuzzConfig, InputType


class TestRng:
    """결정적 난수 스트림 테스트"""

    def test_same_seed_same_stream(self):
        """같은 (seed, 레이블)은 같은 수열"""
        a = derive_stream(7, "generate").integers(0, 1000, size=10)
        b = derive_stream(7, "generate").integers(0, 1000, size=10)
        assert np.array_equal(a, b)

    def test_labels_are_independent(self):
        """레이블이 다르면 다른 수열"""
        a = transform_stream(7, "MR_PER", 0).integers(0, 2**32, size=8)
        b = transform_stream(7, "MR_PER", 1).integers(0, 2**32, size=8)
        c = transform_stream(7, "MR_EXC", 0).integers(0, 2**32, size=8)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_label_key_is_stable(self):
        """레이블 키는 32비트 정수이며 고정"""
        assert label_key("generate") == label_key("generate")
        assert 0 <= label_key(12345) < 2**32


class TestDrawElements:
    """원소 추출 테스트"""

    def test_int_inclusive_bounds(self):
        """정수 모드는 양 끝 포함"""
        rng = derive_stream(0, "test")
        values = draw_elements(rng, 1, 3, InputType.INT, 3000)
        assert set(values) == {1, 2, 3}
        assert all(isinstance(v, int) for v in values)

    def test_float_within_bounds(self):
        """실수 모드는 구간 안의 float"""
        rng = derive_stream(0, "test")
        values = draw_elements(rng, -1.5, 2.5, InputType.FLOAT, 1000)
        assert all(isinstance(v, float) for v in values)
        assert all(-1.5 <= v <= 2.5 for v in values)


class TestFuzzer:
    """Fuzzer 테스트"""

    def test_count_budget(self):
        """개수 예산만큼 생성하고 id는 0부터 연속"""
        data = generate(FuzzConfig(budget=CountBudget(50), seed=3))
        assert len(data) == 50
        assert [d.id for d in data] == list(range(50))

    def test_lengths_and_range(self):
        """길이와 원소가 설정 범위 안"""
        config = FuzzConfig(low=-15, high=15, min_len=0, max_len=20, seed=1)
        for datum in generate(config):
            assert 0 <= len(datum.values) <= 20
            assert all(-15 <= v <= 15 for v in datum.values)

    def test_rq2_produces_empty_lists(self):
        """min_len=0이면 빈 리스트가 나옴"""
        config = FuzzConfig(low=-15, high=15, min_len=0, max_len=20, seed=7)
        assert any(not d.values for d in generate(config))

    def test_deterministic(self):
        """같은 설정이면 원소 단위로 동일"""
        config = FuzzConfig(budget=CountBudget(200), seed=42)
        assert generate(config) == generate(config)

    def test_seed_changes_data(self):
        """시드가 다르면 다른 데이터"""
        a = generate(FuzzConfig(budget=CountBudget(20), seed=1))
        b = generate(FuzzConfig(budget=CountBudget(20), seed=2))
        assert a != b

    def test_duration_budget(self):
        """시간 예산은 최소 한 건 이상 생성"""
        data = Fuzzer(FuzzConfig(budget=DurationBudget(0.01))).generate()
        assert len(data) >= 1
        assert [d.id for d in data] == list(range(len(data)))

    def test_fixed_length(self):
        """min_len = max_len이면 모든 길이가 같음"""
        config = FuzzConfig(min_len=4, max_len=4, budget=CountBudget(30))
        assert {len(d.values) for d in generate(config)} == {4}

    def test_uniform_int_elements(self):
        """[1, 50] 정수 원소는 값마다 빈도가 1/50의 ±30% 안"""
        data = generate(FuzzConfig(budget=CountBudget(2000), seed=7))
        values = np.array([v for d in data for v in d.values])
        assert len(values) >= 10_000

        counts = np.bincount(values, minlength=51)[1:]
        expected = len(values) / 50
        assert np.all(np.abs(counts - expected) <= 0.3 * expected)

    def test_symmetric_range_mean(self):
        """[-15, 15] 1000건의 원소 평균은 0 ± 0.5"""
        config = FuzzConfig(low=-15, high=15, budget=CountBudget(1000), seed=11)
        values = [v for d in generate(config) for v in d.values]
        assert abs(np.mean(values)) <= 0.5

    def test_degenerate_range(self):
        """low = high이면 모든 원소가 그 값"""
        config = FuzzConfig(low=5, high=5, min_len=4, max_len=4, budget=CountBudget(10))
        assert {d.values for d in generate(config)} == {(5, 5, 5, 5)}
