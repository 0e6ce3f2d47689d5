"""Continuous Active Learning with a verification subprotocol per batch.

Each iteration trains a linear SVM on the labelled set S, ranks the remaining
documents by their projection on the SVM normal, embeds the top batch on the
line by that score and labels it through the configured Label-Verification
subprotocol.  Everything the subprotocol shows Bob accumulates into the
revealed set B.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import Instance, LinearModel, OneDimInstance
from .parties import AliceOracle, BobOracle, CourtOracle
from .protocols import (
    ClassifierReportConfig,
    LabelReportConfig,
    run_classifier_report,
    run_label_report,
    run_reveal_all,
)
from .seeding import split_seed


class DegenerateTrainingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SvmConfig:
    regularization: float = 1e-2
    epochs: int = 300
    eta0: float = 1.0
    decay: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.regularization <= 0:
            raise ValueError("regularization must be positive")
        if self.epochs < 1:
            raise ValueError("need at least one epoch")


def svm_objective(w, b, X, y, regularization) -> float:
    margins = y * (X @ w + b)
    return 0.5 * regularization * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).mean())


class LinearSVM(ClassifierMixin, BaseEstimator):
    """L2-regularised hinge-loss SVM trained by full-batch subgradient descent.

    Starts from w = 0, b = 0 and steps with ``eta0 / (1 + decay * t)``.
    Subgradient steps are not monotone, so the best iterate seen so far is
    kept; ``objective_curve_`` records its objective after every epoch.

    With a single class present the model is the class-mean direction (signed
    by the label) with the intercept placing every sample on its own side, and
    ``degenerate_`` is set.
    """

    def __init__(self, regularization=1e-2, epochs=300, eta0=1.0, decay=0.05, seed=0):
        self.regularization = regularization
        self.epochs = epochs
        self.eta0 = eta0
        self.decay = decay
        self.seed = seed

    @classmethod
    def from_config(cls, cfg: SvmConfig) -> "LinearSVM":
        return cls(cfg.regularization, cfg.epochs, cfg.eta0, cfg.decay, cfg.seed)

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        y = y.astype(float)
        if not np.isin(y, (-1, 1)).all():
            raise ValueError("labels must be -1 or +1")
        if self.regularization <= 0:
            raise ValueError("regularization must be positive")
        self.classes_ = np.array([-1, 1])
        n, d = X.shape
        self.degenerate_ = len(np.unique(y)) < 2
        if self.degenerate_:
            warnings.warn("single-class training set; using the class-mean direction",
                          DegenerateTrainingWarning, stacklevel=2)
            label = y[0]
            w = label * X.mean(axis=0)
            if not np.any(w):
                w = np.zeros(d)
                w[0] = label
            s = X @ w
            b = -s.min() if label > 0 else -s.max() - 1.0
            self.coef_, self.intercept_ = w.reshape(1, -1), np.array([b])
            self.objective_curve_ = np.array([svm_objective(w, b, X, y, self.regularization)])
            return self
        lam = self.regularization
        w, b = np.zeros(d), 0.0
        best = (svm_objective(w, b, X, y, lam), w.copy(), b)
        curve = []
        for t in range(self.epochs):
            active = y * (X @ w + b) < 1.0
            gw = lam * w - (y[active, None] * X[active]).sum(axis=0) / n
            gb = -y[active].sum() / n
            eta = self.eta0 / (1.0 + self.decay * t)
            w, b = w - eta * gw, b - eta * gb
            obj = svm_objective(w, b, X, y, lam)
            if obj < best[0]:
                best = (obj, w.copy(), b)
            curve.append(best[0])
        _, w, b = best
        if not np.any(w):
            w = np.zeros(d)
            w[0] = 1e-12
        self.coef_, self.intercept_ = w.reshape(1, -1), np.array([b])
        self.objective_curve_ = np.array(curve)
        return self

    def decision_function(self, X):
        check_is_fitted(self)
        X = check_array(X)
        return X @ self.coef_[0] + self.intercept_[0]

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, -1)

    def to_model(self) -> LinearModel:
        check_is_fitted(self)
        return LinearModel(self.coef_[0], self.intercept_[0])


def train_linear_svm(X, y, cfg: SvmConfig = SvmConfig()) -> LinearModel:
    return LinearSVM.from_config(cfg).fit(X, y).to_model()


def score(model: LinearModel, X) -> np.ndarray:
    """Projection on the normal vector, w.x (the bias is left out)."""
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != model.d:
        raise ValueError(f"dimension mismatch: model d={model.d}, x d={X.shape[1]}")
    s = X @ model.w
    return float(s[0]) if single else s


def select_top_n(corpus: Instance, excluded, model: LinearModel, n: int) -> OneDimInstance:
    """Top-``n`` remaining documents by score as a 1-D sub-instance (ties: smaller id)."""
    excluded = set(excluded)
    rest = np.array([i for i, d in enumerate(corpus.ids.tolist()) if d not in excluded], dtype=np.int64)
    if len(rest) == 0:
        raise ValueError("no documents left to select")
    s = score(model, corpus.X[rest])
    top = rest[np.lexsort((corpus.ids[rest], -s))[:n]]
    return OneDimInstance(corpus.ids[top], score(model, corpus.X[top]), corpus.y[top])


SUBPROTOCOLS = ("reveal-all", "label-report", "classifier-report")


@dataclass(frozen=True)
class CalConfig:
    T: int = 10
    N_batch: int = 100
    svm: SvmConfig = SvmConfig()
    subprotocol: str = "reveal-all"
    label_cfg: LabelReportConfig = LabelReportConfig(k=1, delta=0.01)
    classifier_cfg: ClassifierReportConfig = ClassifierReportConfig(delta=0.01)
    force_positive_seed: bool = False

    def __post_init__(self):
        if self.T < 1 or self.N_batch < 1:
            raise ValueError("need T >= 1 and N_batch >= 1")
        if self.subprotocol not in SUBPROTOCOLS:
            raise ValueError(f"unknown subprotocol {self.subprotocol!r}")


@dataclass
class IterationRecord:
    iteration: int
    batch_ids: tuple
    labels: dict  # cumulative S: id -> label
    revealed: frozenset  # cumulative B
    recall: float
    nrd: int
    full_reveal: bool
    degenerate_model: bool = False


@dataclass
class CalRunRecord:
    config: CalConfig
    iterations: list = field(default_factory=list)
    truncated: bool = False

    @property
    def recall(self) -> np.ndarray:
        return np.array([it.recall for it in self.iterations])

    @property
    def nrd(self) -> np.ndarray:
        return np.array([it.nrd for it in self.iterations])


def _label_batch(sub: OneDimInstance, cfg: CalConfig, alice, bob, court, seed):
    if cfg.subprotocol == "reveal-all":
        return run_reveal_all(sub, bob)
    if cfg.subprotocol == "label-report":
        return run_label_report(sub, alice, bob, court, cfg.label_cfg, rng=seed)
    return run_classifier_report(sub, alice, bob, court, cfg.classifier_cfg, rng=seed)


def run_cal(corpus: Instance, cfg: CalConfig, alice: AliceOracle | None = None,
            bob: BobOracle | None = None, court: CourtOracle | None = None,
            seed: int = 0) -> CalRunRecord:
    """Trent's simulation of CAL with a verification subprotocol.

    Iteration 0 draws ``N_batch`` documents uniformly (embedded on the line
    in draw order) and labels them through the subprotocol; iterations
    ``1..T`` train, rank, select and label.  The seed-set draw and each
    subprotocol call use separate streams derived from ``seed``.
    """
    if corpus.n == 0:
        raise ValueError("empty corpus")
    alice = alice or AliceOracle.truthful()
    n_plus = corpus.n_plus
    truth = corpus.y
    id_to_row = {int(i): r for r, i in enumerate(corpus.ids)}
    record = CalRunRecord(cfg)
    labels: dict[int, int] = {}
    revealed: set[int] = set()

    draw = np.random.default_rng(split_seed(seed, 0))
    m = min(cfg.N_batch, corpus.n)
    if cfg.force_positive_seed and n_plus:
        pos_rows = np.flatnonzero(truth == 1)
        first = int(draw.choice(pos_rows))
        others = np.setdiff1d(np.arange(corpus.n), [first])
        rows = np.concatenate([[first], draw.choice(others, size=m - 1, replace=False)])
    else:
        rows = draw.choice(corpus.n, size=m, replace=False)
    batch = OneDimInstance(corpus.ids[rows], -np.arange(m, dtype=float), truth[rows])

    for t in range(cfg.T + 1):
        out = _label_batch(batch, cfg, alice, bob, court, split_seed(seed, 1, t))
        for i, lab in out.output_labels.items():
            labels[i] = lab
        revealed |= out.revealed
        rev = np.array([id_to_row[i] for i in revealed], dtype=np.int64)
        rec = float((truth[rev] == 1).sum() / n_plus) if n_plus else float("nan")
        it = IterationRecord(t, tuple(batch.ids.tolist()), dict(labels), frozenset(revealed),
                             rec, int((truth[rev] == -1).sum()), out.full_reveal_triggered)
        record.iterations.append(it)
        if t == cfg.T:
            break
        if len(labels) >= corpus.n:
            record.truncated = True
            break
        S = np.array([id_to_row[i] for i in labels], dtype=np.int64)
        ys = np.array([labels[i] for i in labels])
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateTrainingWarning)
            svm = LinearSVM.from_config(cfg.svm).fit(corpus.X[S], ys)
        it_model = svm.to_model()
        record.iterations[-1].degenerate_model = bool(caught)
        batch = select_top_n(corpus, labels.keys(), it_model, cfg.N_batch)
        if batch.N < cfg.N_batch:
            record.truncated = True
    return record
