import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vizrec.corpus import VIS_TYPES
from vizrec.embed import TrainConfig
from vizrec.evaluation import (
    EvaluationError,
    cross_validate,
    evaluate_records,
    metrics,
    rank_of_truth,
)

from oracles import rank_by_sort


def _scores(values):
    return dict(zip(VIS_TYPES, values))


class TestRankOfTruth:
    def test_strict_winner(self):
        scores = _scores([-1.0, -2.0, -3.0, -4.0, -5.0, -6.0])
        assert rank_of_truth(scores, "bar") == 1.0

    def test_tied_top_pair(self):
        scores = _scores([-1.0, -1.0, -3.0, -4.0, -5.0, -6.0])
        assert rank_of_truth(scores, "bar") == 1.5
        assert rank_of_truth(scores, "box") == 1.5

    def test_missing_type_is_an_error(self):
        scores = _scores([-1.0] * 6)
        del scores["line"]
        with pytest.raises(EvaluationError, match="missing"):
            rank_of_truth(scores, "bar")

    def test_truth_absent_is_an_error(self):
        with pytest.raises(EvaluationError):
            rank_of_truth(_scores([-1.0] * 6), "pie")

    @given(st.lists(st.floats(-10, 0), min_size=6, max_size=6), st.integers(0, 5))
    @settings(max_examples=100, deadline=None)
    def test_matches_sort_oracle(self, values, truth_idx):
        scores = _scores(values)
        truth = VIS_TYPES[truth_idx]
        assert rank_of_truth(scores, truth) == pytest.approx(rank_by_sort(scores, truth))

    @given(st.permutations(list(range(6))))
    @settings(max_examples=30, deadline=None)
    def test_distinct_scores_equal_sort_position(self, perm):
        values = [-float(i) for i in perm]
        scores = _scores(values)
        ordered = sorted(VIS_TYPES, key=lambda vt: -scores[vt])
        for vt in VIS_TYPES:
            assert rank_of_truth(scores, vt) == ordered.index(vt) + 1


class TestMetrics:
    def test_unit_case_1(self):
        m = metrics([1, 2, 3], [True, True, False])
        assert m["mr"] == 2.0
        assert m["hits_at_2"] == pytest.approx(2 / 3)

    def test_unit_case_2(self):
        m = metrics([1, 3, 2, 5], [True] * 4)
        assert m["hits_at_2"] == 0.5

    def test_axis_accuracy(self):
        m = metrics([1], [True, False, True, True])
        assert m["axis_accuracy"] == 0.75

    def test_empty_is_an_error(self):
        with pytest.raises(EvaluationError):
            metrics([], [])

    @given(st.lists(st.floats(1, 6), min_size=1, max_size=30), st.integers(0, 999))
    @settings(max_examples=30, deadline=None)
    def test_order_invariant(self, ranks, seed):
        rng = np.random.default_rng(seed)
        hits = [bool(b) for b in rng.integers(0, 2, len(ranks))]
        perm = list(rng.permutation(len(ranks)))
        a = metrics(ranks, hits)
        b = metrics([ranks[i] for i in perm], [hits[i] for i in perm])
        assert a == pytest.approx(b, abs=1e-12)


FAST_CFG = TrainConfig(dim=16, batch_size=64, steps=120, n_neg=4, seed=2, learning_rate=0.01)


class TestCrossValidate:
    def test_partition_property(self, small_records):
        folds = 5
        rng = np.random.default_rng(0)
        order = rng.permutation(len(small_records))
        parts = np.array_split(order, folds)
        seen = sorted(int(i) for p in parts for i in p)
        assert seen == list(range(len(small_records)))

    def test_fold_assignment_deterministic(self, small_records):
        a = np.random.default_rng(7).permutation(len(small_records))
        b = np.random.default_rng(7).permutation(len(small_records))
        assert np.array_equal(a, b)

    def test_report_shape(self, small_records):
        report = cross_validate(
            small_records[:10], FAST_CFG, folds=5, rng=np.random.default_rng(1)
        )
        assert len(report.folds) == 5
        assert sum(f.n_columns for f in report.folds) == 20
        assert 1.0 <= report.mr <= 6.0
        assert 0.0 <= report.hits_at_2 <= 1.0
        assert 0.0 <= report.axis_accuracy <= 1.0
        assert report.config_fingerprint
        csv_text = report.per_fold_csv()
        assert csv_text.startswith("fold,mr,hits2,axis_acc\n")
        assert len(csv_text.strip().splitlines()) == 6

    def test_too_few_records(self, small_records):
        with pytest.raises(EvaluationError, match="at least"):
            cross_validate(small_records[:3], FAST_CFG, folds=5)

    def test_evaluate_records_on_training_split(self, small_records, small_bundle):
        ranks, hits = evaluate_records(small_bundle, small_records[:4])
        assert len(ranks) == 8
        assert all(1.0 <= r <= 6.0 for r in ranks)
