import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ediscovery.cal import (
    CalConfig,
    DegenerateTrainingWarning,
    LinearSVM,
    SvmConfig,
    run_cal,
    score,
    select_top_n,
    svm_objective,
    train_linear_svm,
)
from ediscovery.core import Instance, LinearModel, classifier_error
from ediscovery.datagen import GaussianConfig, gaussian_mixture

TOY_X = np.array([[2.0, 2.0], [3.0, 2.5], [-2.0, -1.0], [-3.0, -2.0]])
TOY_Y = np.array([1, 1, -1, -1])


@pytest.fixture(scope="module")
def corpus():
    return gaussian_mixture(GaussianConfig(600, 5, 0.1, 2.0, 3))


class TestSvm:
    def test_separable_toy(self):
        h = train_linear_svm(TOY_X, TOY_Y)
        assert classifier_error(h, Instance(range(4), TOY_X, TOY_Y)) == 0

    def test_duplication_invariant(self):
        a = train_linear_svm(TOY_X, TOY_Y)
        b = train_linear_svm(np.vstack([TOY_X, TOY_X]), np.concatenate([TOY_Y, TOY_Y]))
        assert np.allclose(a.w, b.w, atol=1e-9) and abs(a.b - b.b) < 1e-9

    def test_flipped_labels_negate(self):
        a = train_linear_svm(TOY_X, TOY_Y)
        b = train_linear_svm(TOY_X, -TOY_Y)
        assert np.allclose(a.w, -b.w, atol=1e-9) and abs(a.b + b.b) < 1e-9

    @given(st.integers(0, 10_000))
    def test_objective_non_increasing(self, seed):
        rng = np.random.default_rng(seed)
        X = rng.normal(size=(40, 3))
        y = np.where(X[:, 0] + 0.5 * rng.normal(size=40) > 0, 1, -1)
        if len(set(y)) < 2:
            y[0] = -y[0]
        svm = LinearSVM(epochs=80).fit(X, y)
        assert np.all(np.diff(svm.objective_curve_) <= 1e-9)
        w, b = svm.coef_[0], svm.intercept_[0]
        assert svm_objective(w, b, X, y, svm.regularization) == pytest.approx(svm.objective_curve_[-1])

    def test_single_class_degenerate(self):
        with pytest.warns(DegenerateTrainingWarning):
            svm = LinearSVM().fit(TOY_X[:2], [1, 1])
        assert svm.degenerate_ and (svm.predict(TOY_X[:2]) == 1).all()
        with pytest.warns(DegenerateTrainingWarning):
            svm = LinearSVM().fit(TOY_X[2:], [-1, -1])
        assert (svm.predict(TOY_X[2:]) == -1).all()

    def test_deterministic(self):
        a, b = train_linear_svm(TOY_X, TOY_Y), train_linear_svm(TOY_X, TOY_Y)
        assert np.array_equal(a.w, b.w) and a.b == b.b

    def test_bad_regularization(self):
        with pytest.raises(ValueError):
            SvmConfig(regularization=0.0)

    def test_sklearn_clone(self):
        from sklearn.base import clone

        svm = clone(LinearSVM(regularization=0.1))
        assert svm.get_params()["regularization"] == 0.1


class TestScoreAndSelect:
    def test_score_examples(self):
        assert score(LinearModel([0.0, 1.0], 9.0), [5.0, 3.0]) == 3.0
        assert score(LinearModel([1.0, 1.0], 0.0), [1.0, -1.0]) == 0.0

    def test_score_scaling(self):
        X = np.random.default_rng(0).normal(size=(10, 3))
        w = np.array([1.0, -2.0, 0.5])
        s1, s2 = score(LinearModel(w, 0.0), X), score(LinearModel(2 * w, 0.0), X)
        assert np.allclose(s2, 2 * s1) and (np.argsort(s1) == np.argsort(s2)).all()

    def test_score_dimension(self):
        with pytest.raises(ValueError):
            score(LinearModel([1.0], 0.0), [1.0, 2.0])

    def test_select_all_remaining(self):
        inst = Instance(range(5), np.arange(5.0).reshape(-1, 1), [1, -1, -1, 1, -1])
        sub = select_top_n(inst, {0, 1}, LinearModel([1.0], 0.0), 10)
        assert sorted(sub.ids.tolist()) == [2, 3, 4]

    def test_select_ties_smallest_ids(self):
        inst = Instance([9, 4, 7, 1, 3], np.zeros((5, 2)), [1, -1, -1, 1, -1])
        sub = select_top_n(inst, set(), LinearModel([1.0, 0.0], 0.0), 3)
        assert sub.ids.tolist() == [1, 3, 4]

    def test_select_matches_sort(self):
        rng = np.random.default_rng(1)
        inst = Instance(rng.permutation(50), rng.normal(size=(50, 3)), rng.choice([-1, 1], 50))
        h = LinearModel(rng.normal(size=3), 0.0)
        sub = select_top_n(inst, set(), h, 10)
        ref = sorted(zip(-(inst.X @ h.w), inst.ids))[:10]
        assert sub.ids.tolist() == [i for _, i in ref]
        assert np.allclose(sub.positions, [-s for s, _ in ref])

    def test_select_empty(self):
        inst = Instance([1], [[0.0]], [1])
        with pytest.raises(ValueError):
            select_top_n(inst, {1}, LinearModel([1.0], 0.0), 1)


class TestRunCal:
    def cfg(self, proto, **kw):
        return CalConfig(T=4, N_batch=40, subprotocol=proto, **kw)

    def test_reveal_all_is_plain_cal(self, corpus):
        rec = run_cal(corpus, self.cfg("reveal-all"), seed=5)
        truth = corpus.truth
        for it in rec.iterations:
            assert all(truth[i] == lab for i, lab in it.labels.items())
            assert it.revealed == frozenset(it.labels)
            assert it.nrd == sum(1 for i in it.labels if truth[i] == -1)

    def test_truthful_label_report_matches_reveal_all(self, corpus):
        a = run_cal(corpus, self.cfg("reveal-all"), seed=5)
        b = run_cal(corpus, self.cfg("label-report"), seed=5)
        for x, y in zip(a.iterations, b.iterations):
            assert x.labels == y.labels and x.recall == y.recall
            assert y.nrd <= x.nrd

    @pytest.mark.parametrize("proto", ["reveal-all", "label-report", "classifier-report"])
    def test_growth_and_monotone(self, corpus, proto):
        rec = run_cal(corpus, self.cfg(proto), seed=2)
        seen = set()
        for prev, it in zip([None] + rec.iterations, rec.iterations):
            batch = set(it.batch_ids)
            assert len(batch) == 40 and not batch & seen
            seen |= batch
            assert set(it.labels) == seen
            if prev is not None:
                assert prev.revealed <= it.revealed and prev.recall <= it.recall and prev.nrd <= it.nrd
        assert len(rec.iterations) == 5 and not rec.truncated

    def test_truncates_at_exhaustion(self):
        small = gaussian_mixture(GaussianConfig(100, 2, 0.2, 2.0, 0))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rec = run_cal(small, CalConfig(T=10, N_batch=30), seed=0)
        assert rec.truncated and len(rec.iterations[-1].labels) == 100

    def test_forced_positive_seed(self, corpus):
        rec = run_cal(corpus, self.cfg("reveal-all", force_positive_seed=True), seed=8)
        assert any(corpus.truth[i] == 1 for i in rec.iterations[0].batch_ids)

    def test_seeded_reproducible(self, corpus):
        a = run_cal(corpus, self.cfg("classifier-report"), seed=4)
        b = run_cal(corpus, self.cfg("classifier-report"), seed=4)
        assert list(a.recall) == list(b.recall) and list(a.nrd) == list(b.nrd)

    def test_bad_config(self):
        with pytest.raises(ValueError):
            CalConfig(subprotocol="manual")
