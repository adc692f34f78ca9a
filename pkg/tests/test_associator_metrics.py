import numpy as np
import pytest

from inciplan.associator import (
    METRIC_VECTOR_LENGTH,
    TTI_THRESHOLDS,
    evaluate_metrics,
    feature_names,
    metric_precision,
    metric_rule,
    metric_similarity,
)
from inciplan.domain import DomainError

NULL_KEY = np.zeros(10, dtype=int)


def key_with(incident=(), arterial=(), n=10):
    key = np.zeros(n, dtype=int)
    key[list(incident)] = 1
    key[list(arterial)] = 2
    return key


class TestPrecision:
    def test_triggered_incident_segment(self):
        query = np.ones(10)
        query[3] = 3.0
        assert metric_precision(query, key_with(incident=[3], arterial=[7]), 2.0) == 1.0

    def test_all_below_threshold(self):
        query = np.full(10, 1.5)
        assert metric_precision(query, key_with(incident=[3], arterial=[7]), 2.0) == 0.0

    def test_null_plan_fraction_of_negatives(self):
        query = np.ones(10)
        query[[0, 4]] = 9.0
        assert metric_precision(query, NULL_KEY, 2.0) == pytest.approx(0.8)

    def test_unknown_threshold_rejected(self):
        with pytest.raises(DomainError, match="threshold"):
            metric_precision(np.ones(10), NULL_KEY, 3.0)

    def test_monotone_in_key1_tti(self):
        key = key_with(incident=[2], arterial=[5])
        base = np.ones(10)
        for threshold in TTI_THRESHOLDS:
            previous = -1.0
            for tti in (1.0, 1.7, 2.1, 2.6, 6.0, 12.0):
                query = base.copy()
                query[2] = tti
                value = metric_precision(query, key, threshold)
                assert value >= previous
                previous = value


class TestRule:
    def test_both_sides_congested(self):
        query = np.ones(10)
        query[2] = 3.0
        query[5] = 2.5
        assert metric_rule(query, key_with(incident=[2], arterial=[5]), 2.0) == 1.0

    def test_only_freeway_congested(self):
        query = np.ones(10)
        query[2] = 3.0
        assert metric_rule(query, key_with(incident=[2], arterial=[5]), 2.0) == 0.0

    def test_null_plan_quiet_network(self):
        assert metric_rule(np.ones(10), NULL_KEY, 2.0) == 1.0
        noisy = np.ones(10)
        noisy[0] = 5.0
        assert metric_rule(noisy, NULL_KEY, 2.0) == 0.0


class TestSimilarity:
    def test_exact_match_scores_one(self):
        key = key_with(incident=[1], arterial=[2], n=4)
        query = np.array([1.0, 2.0, 2.0, 1.0])  # clips/normalizes to the key
        assert metric_similarity(query, key, 2.0) == 1.0

    def test_unit_distance_halves(self):
        key = key_with(incident=[0], arterial=[1], n=3)
        # after clipping at 2 and min-max: [1, 0, ...] differs from key [1,1,0]
        query = np.array([2.0, 1.0, 1.0])
        assert metric_similarity(query, key, 2.0) == pytest.approx(0.5)

    def test_uncongested_query_matches_null_key(self):
        assert metric_similarity(np.ones(10), NULL_KEY, 2.0) == 1.0

    def test_bounded_in_unit_interval(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            query = 1.0 + rng.exponential(2.0, size=10)
            key = key_with(incident=[1, 2], arterial=[5])
            for threshold in TTI_THRESHOLDS:
                value = metric_similarity(query, key, threshold)
                assert 0.0 < value <= 1.0


class TestMetricVector:
    def test_length_is_105(self):
        query = np.ones((7, 10))
        vec = evaluate_metrics(query, key_with(incident=[1], arterial=[2]))
        assert vec.shape == (METRIC_VECTOR_LENGTH,)
        assert METRIC_VECTOR_LENGTH == 105

    def test_uncongested_query_zeroes_precision_and_rule(self):
        vec = evaluate_metrics(np.ones((7, 10)), key_with(incident=[1], arterial=[2]))
        names = feature_names()
        for name, value in zip(names, vec):
            if name.endswith("precision") or name.endswith("rule"):
                assert value == 0.0

    def test_duplicate_horizon_rows_give_identical_blocks(self):
        rng = np.random.default_rng(1)
        row = 1.0 + rng.exponential(1.0, size=10)
        query = np.tile(row, (7, 1))
        vec = evaluate_metrics(query, key_with(incident=[0], arterial=[9]))
        blocks = vec.reshape(7, -1)
        for h in range(1, 7):
            np.testing.assert_array_equal(blocks[h], blocks[0])

    def test_all_entries_nonnegative(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            query = 1.0 + rng.exponential(1.5, size=(7, 10))
            key = key_with(incident=[1, 3], arterial=[6, 7])
            assert np.all(evaluate_metrics(query, key) >= 0.0)

    def test_binary_families_for_non_null_plans(self):
        rng = np.random.default_rng(3)
        query = 1.0 + rng.exponential(1.5, size=(7, 10))
        vec = evaluate_metrics(query, key_with(incident=[1], arterial=[2]))
        for name, value in zip(feature_names(), vec):
            if name.endswith("precision") or name.endswith("rule"):
                assert value in (0.0, 1.0)
            else:
                assert 0.0 < value <= 1.0

    def test_bad_query_shape_rejected(self):
        with pytest.raises(DomainError, match="horizon rows"):
            evaluate_metrics(np.ones((6, 10)), NULL_KEY)
        with pytest.raises(DomainError, match="key width"):
            evaluate_metrics(np.ones((7, 9)), NULL_KEY)


def test_feature_names_order_and_format():
    names = feature_names()
    assert len(names) == 105
    assert names[0] == "0min-1.6-precision"
    assert names[1] == "0min-1.6-rule"
    assert names[2] == "0min-1.6-similarity"
    assert names[3] == "0min-2-precision"
    assert names[15] == "5min-1.6-precision"
    assert names[-1] == "30min-10-similarity"
    assert "5min-2-similarity" in names
