import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import line
from ediscovery.core import (
    INF,
    EmptyInstanceError,
    Instance,
    LinearModel,
    ProtocolOutcome,
    Sampled,
    UndefinedRecallError,
    candidate_thresholds,
    classifier_error,
    classify,
    nrd,
    optimal_threshold_report,
    optimal_threshold_true,
    recall,
    threshold_error,
)


def brute_err(pos, lab, t):
    return sum(1 for x, y in zip(pos, lab) if (1 if x >= t else -1) != y)


small_lines = st.integers(1, 40).flatmap(lambda n: st.tuples(
    st.lists(st.integers(-5, 5).map(float), min_size=n, max_size=n),
    st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n)))


def outcome(revealed):
    return ProtocolOutcome(frozenset(revealed), {}, {})


class TestClassify:
    def test_boundary_is_positive(self):
        assert classify(LinearModel([1.0], 0.0), [0.0]) == 1

    def test_shifted(self):
        assert classify(LinearModel([1.0, 0.0], -1.0), [2.0, 5.0]) == 1

    def test_negative(self):
        assert classify(LinearModel([1.0], 0.0), [-3.0]) == -1

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            classify(LinearModel([1.0, 0.0], 0.0), [1.0])

    def test_zero_normal_rejected(self):
        with pytest.raises(ValueError):
            LinearModel([0.0, 0.0], 1.0)


class TestClassifierError:
    def test_separating_model(self):
        inst = Instance([0, 1, 2, 3], [[0.0], [1.0], [3.0], [4.0]], [-1, -1, 1, 1])
        assert classifier_error(LinearModel([1.0], -2.0), inst) == 0

    def test_all_positive_side_on_negatives(self):
        inst = Instance([0, 1, 2], [[0.0], [1.0], [2.0]], [-1, -1, -1])
        assert classifier_error(LinearModel([1.0], 10.0), inst) == 3

    def test_three_points(self):
        inst = Instance([0, 1, 2], [[1.0], [2.0], [3.0]], [1, -1, 1])
        assert classifier_error(LinearModel([1.0], -3.0), inst) == 1


class TestThresholds:
    def test_error_zero(self, four):
        assert threshold_error(four, 3.0) == 0

    def test_error_infinite_threshold_counts_positives(self, four):
        assert threshold_error(four, INF) == four.N_plus

    def test_error_mixed(self):
        assert threshold_error(line([1.0, 2.0, 3.0], [1, -1, 1]), 2.0) == 2

    def test_optimal_true(self, four):
        assert optimal_threshold_true(four) == (3.0, 0)

    def test_optimal_true_all_positive(self):
        assert optimal_threshold_true(line([5.0, 7.0], [1, 1])) == (5.0, 0)

    def test_optimal_true_largest_minimiser(self):
        assert optimal_threshold_true(line([1.0, 2.0, 3.0], [1, -1, 1])) == (3.0, 1)

    def test_optimal_report_truth(self, four):
        assert optimal_threshold_report(four, {0: -1, 1: -1, 2: 1, 3: 1}) == (3.0, 0)

    def test_optimal_report_smallest_minimiser(self):
        inst = line([1.0, 2.0, 3.0], [1, -1, 1])
        assert optimal_threshold_report(inst, [1, -1, 1]) == (1.0, 1)

    def test_optimal_report_all_negative(self, four):
        assert optimal_threshold_report(four, [-1] * 4) == (INF, 0)

    def test_incomplete_report(self, four):
        with pytest.raises(ValueError):
            optimal_threshold_report(four, {0: 1})

    def test_empty_instance(self):
        with pytest.raises(EmptyInstanceError):
            optimal_threshold_true(line([], []))

    def test_walk_order_ties_by_id(self):
        inst = line([1.0, 2.0, 2.0, 0.5], [1, 1, -1, -1], ids=[7, 5, 3, 9])
        assert inst.ids[inst.walk_order()].tolist() == [3, 5, 7, 9]

    @given(small_lines)
    def test_error_matches_pointwise(self, data):
        pos, lab = data
        inst = line(pos, lab)
        for t in list(candidate_thresholds(inst)) + [-INF, 0.5]:
            assert threshold_error(inst, t) == brute_err(pos, lab, t)

    @given(small_lines)
    def test_true_optimum_is_largest_minimiser(self, data):
        inst = line(*data)
        t, e = optimal_threshold_true(inst)
        errs = {c: threshold_error(inst, c) for c in candidate_thresholds(inst)}
        assert e == min(errs.values()) == errs[t]
        assert all(v > e for c, v in errs.items() if c > t)

    @given(small_lines)
    def test_report_optimum_is_smallest_minimiser(self, data):
        pos, lab = data
        inst = line(pos, lab)
        t, e = optimal_threshold_report(inst, lab)
        errs = {c: threshold_error(inst, c) for c in candidate_thresholds(inst)}
        assert e == errs[t] and all(v > e for c, v in errs.items() if c < t)

    @given(small_lines, st.floats(-6, 6))
    def test_threshold_matches_linear_model(self, data, t):
        inst = line(*data)
        assert threshold_error(inst, t) == classifier_error(LinearModel([1.0], -t), inst.to_instance())


class TestMetrics:
    inst = line(np.arange(14.0), [1] * 4 + [-1] * 10)

    def test_recall_all(self):
        assert recall(outcome(range(4)), self.inst) == 1.0

    def test_recall_empty(self):
        assert recall(outcome([]), self.inst) == 0.0

    def test_recall_partial(self):
        assert recall(outcome([0, 1, 2, *range(4, 11)]), self.inst) == 0.75

    def test_recall_undefined(self):
        with pytest.raises(UndefinedRecallError):
            recall(outcome([0]), line([1.0], [-1]))

    def test_nrd_positives_only(self):
        assert nrd(outcome(range(4)), self.inst) == 0

    def test_nrd_everything(self):
        assert nrd(outcome(range(14)), self.inst) == 10

    def test_nrd_partial(self):
        assert nrd(outcome([0, 1, 2, *range(4, 11)]), self.inst) == 7

    @given(st.sets(st.integers(0, 13)))
    def test_partition_identity(self, B):
        o = outcome(B)
        assert math.isclose(recall(o, self.inst) * 4 + nrd(o, self.inst), len(B))


class TestTypes:
    def test_instance_counts(self):
        inst = Instance([1, 2, 3], np.zeros((3, 2)), [1, -1, -1])
        assert (inst.n, inst.n_plus, inst.n_minus, inst.d) == (3, 1, 2, 2)

    def test_duplicate_ids_rejected(self):
        with pytest.raises(ValueError):
            Instance([1, 1], np.zeros((2, 1)), [1, -1])

    def test_bad_labels_rejected(self):
        with pytest.raises(ValueError):
            line([1.0], [0])

    def test_immutable(self, four):
        with pytest.raises(ValueError):
            four.positions[0] = 9.0

    def test_sampled_probability_range(self):
        with pytest.raises(ValueError):
            Sampled(1, 0.0)

    def test_outcome_court_subset_of_revealed(self):
        with pytest.raises(ValueError):
            ProtocolOutcome(frozenset(), {1: 1}, {1: 1})

    def test_outcome_unverified_positive(self):
        with pytest.raises(AssertionError):
            ProtocolOutcome(frozenset(), {}, {1: 1})

    def test_duplicate_positions_are_distinct_documents(self):
        inst = line([1.0, 1.0, 1.0], [1, -1, 1])
        assert threshold_error(inst, 1.0) == 1 and inst.N == 3
