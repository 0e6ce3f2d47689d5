"""Domain types, threshold arithmetic and the two evaluation metrics.

Labels are always integers in {-1, +1}.  A document is classified positive
when ``w.x + b >= 0``; the same ``>=`` convention applies to thresholds, so a
point sitting exactly on a threshold is on the positive side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple

import numpy as np

INF = math.inf


class EmptyInstanceError(ValueError):
    pass


class UndefinedRecallError(ValueError):
    pass


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


def _check_labels(y: np.ndarray) -> None:
    if y.size and not np.isin(y, (-1, 1)).all():
        raise ValueError("labels must be -1 or +1")


class Document(NamedTuple):
    id: int
    features: np.ndarray


@dataclass(frozen=True, eq=False)
class Instance:
    """A set of embedded documents with their hidden true labels."""

    ids: np.ndarray
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64).reshape(-1)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.ndim != 2 or len(X) != len(ids) or len(y) != len(ids):
            raise ValueError("ids, features and labels must have matching lengths")
        if len(np.unique(ids)) != len(ids):
            raise ValueError("document ids must be unique")
        _check_labels(y)
        object.__setattr__(self, "ids", _frozen(ids))
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "y", _frozen(y))

    @classmethod
    def from_documents(cls, docs: Iterable[Document], truth: Mapping[int, int]) -> "Instance":
        docs = list(docs)
        if set(truth) != {d.id for d in docs}:
            raise ValueError("truth must cover exactly the document ids")
        d = len(docs[0].features) if docs else 1
        X = np.array([d_.features for d_ in docs], dtype=float).reshape(len(docs), d)
        return cls([d_.id for d_ in docs], X, [truth[d_.id] for d_ in docs])

    @property
    def documents(self) -> Iterator[Document]:
        for i, x in zip(self.ids, self.X):
            yield Document(int(i), x)

    @property
    def truth(self) -> dict[int, int]:
        return dict(zip(self.ids.tolist(), self.y.tolist()))

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def d(self) -> int:
        return self.X.shape[1]

    @property
    def n_plus(self) -> int:
        return int((self.y == 1).sum())

    @property
    def n_minus(self) -> int:
        return int((self.y == -1).sum())

    # aliases so the protocol session and oracles accept either instance kind
    @property
    def labels(self) -> np.ndarray:
        return self.y

    @property
    def N(self) -> int:
        return self.n

    def subset(self, idx) -> "Instance":
        idx = np.asarray(idx, dtype=np.int64)
        return Instance(self.ids[idx], self.X[idx], self.y[idx])

    def with_labels(self, y) -> "Instance":
        return Instance(self.ids, self.X, y)

    def __len__(self) -> int:
        return self.n


@dataclass(frozen=True, eq=False)
class OneDimInstance:
    """Documents embedded on the real line (``positions``) with true labels."""

    ids: np.ndarray
    positions: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        ids = np.asarray(self.ids, dtype=np.int64).reshape(-1)
        pos = np.asarray(self.positions, dtype=float).reshape(-1)
        y = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(pos) != len(ids) or len(y) != len(ids):
            raise ValueError("ids, positions and labels must have matching lengths")
        if len(np.unique(ids)) != len(ids):
            raise ValueError("document ids must be unique")
        if not np.isfinite(pos).all():
            raise ValueError("positions must be finite")
        _check_labels(y)
        object.__setattr__(self, "ids", _frozen(ids))
        object.__setattr__(self, "positions", _frozen(pos))
        object.__setattr__(self, "labels", _frozen(y))

    @classmethod
    def from_instance(cls, inst: Instance) -> "OneDimInstance":
        if inst.d != 1:
            raise ValueError(f"expected a 1-D instance, got d={inst.d}")
        return cls(inst.ids, inst.X[:, 0], inst.y)

    def to_instance(self) -> Instance:
        return Instance(self.ids, self.positions.reshape(-1, 1), self.labels)

    @property
    def truth(self) -> dict[int, int]:
        return dict(zip(self.ids.tolist(), self.labels.tolist()))

    @property
    def N(self) -> int:
        return len(self.ids)

    @property
    def N_plus(self) -> int:
        return int((self.labels == 1).sum())

    @property
    def N_minus(self) -> int:
        return int((self.labels == -1).sum())

    def __len__(self) -> int:
        return self.N

    def walk_order(self) -> np.ndarray:
        """Indices sorted by position descending, ties by ascending id."""
        return np.lexsort((self.ids, -self.positions))


@dataclass(frozen=True, eq=False)
class LinearModel:
    w: np.ndarray
    b: float

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).reshape(-1)
        if not np.any(w):
            raise ValueError("normal vector w must be non-zero")
        object.__setattr__(self, "w", _frozen(w))
        object.__setattr__(self, "b", float(self.b))

    @property
    def d(self) -> int:
        return len(self.w)

    def decision(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(1, -1) if X.shape[0] == self.d else X.reshape(-1, 1)
        if X.shape[1] != self.d:
            raise ValueError(f"dimension mismatch: model d={self.d}, x d={X.shape[1]}")
        return X @ self.w + self.b

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision(X) >= 0, 1, -1)


@dataclass(frozen=True)
class ThresholdAnalysis:
    t_star: float
    t_star_A: float
    err_star: int
    err_A_at_t_star_A: int


# -- transcript ---------------------------------------------------------------

@dataclass(frozen=True)
class ReportReceived:
    n_labels: int
    threshold: float | None = None

    def __str__(self):
        if self.threshold is None:
            return f"report labels={self.n_labels}"
        return f"report labels={self.n_labels} threshold={self.threshold!r}"


@dataclass(frozen=True)
class Revealed:
    id: int

    def __str__(self):
        return f"reveal {self.id}"


@dataclass(frozen=True)
class Sampled:
    id: int
    probability: float

    def __post_init__(self):
        if not 0.0 < self.probability <= 1.0:
            raise ValueError("sampling probability must lie in (0, 1]")

    def __str__(self):
        return f"sample {self.id} p={self.probability!r}"


@dataclass(frozen=True)
class SentToCourt:
    id: int
    decision: int

    def __str__(self):
        return f"court {self.id} -> {self.decision:+d}"


@dataclass(frozen=True)
class EpochReset:
    def __str__(self):
        return "epoch-reset"


@dataclass(frozen=True)
class FullReveal:
    reason: str

    def __str__(self):
        return f"full-reveal {self.reason}"


@dataclass(frozen=True)
class Stopped:
    def __str__(self):
        return "stop"


TranscriptEvent = ReportReceived | Revealed | Sampled | SentToCourt | EpochReset | FullReveal | Stopped


def format_transcript(events: Iterable[TranscriptEvent]) -> str:
    return "\n".join(str(e) for e in events)


@dataclass(frozen=True)
class ProtocolOutcome:
    revealed: frozenset
    court_settled: Mapping[int, int]
    output_labels: Mapping[int, int]
    transcript: tuple = ()
    full_reveal_triggered: bool = False
    extras: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not set(self.court_settled) <= set(self.revealed):
            raise ValueError("court-settled documents must have been revealed")
        for i, lab in self.output_labels.items():
            if lab == 1 and i not in self.revealed and i not in self.court_settled:
                raise AssertionError(f"document {i} output positive without verification")

    @classmethod
    def empty(cls) -> "ProtocolOutcome":
        return cls(frozenset(), {}, {}, (), False)


# -- operations ---------------------------------------------------------------

def classify(model: LinearModel, x) -> int:
    x = np.asarray(x, dtype=float).reshape(-1)
    if len(x) != model.d:
        raise ValueError(f"dimension mismatch: model d={model.d}, x d={len(x)}")
    return 1 if float(model.w @ x) + model.b >= 0 else -1


def classifier_error(model: LinearModel, instance: Instance) -> int:
    if instance.n == 0:
        return 0
    return int((model.predict(instance.X) != instance.y).sum())


def threshold_errors(positions, labels, thresholds) -> np.ndarray:
    """err(t) for every t in ``thresholds`` (``INF`` classifies all negative)."""
    positions = np.asarray(positions, dtype=float)
    labels = np.asarray(labels)
    t = np.asarray(thresholds, dtype=float)
    neg = np.sort(positions[labels == -1])
    pos = np.sort(positions[labels == 1])
    # negatives at or above t are false positives, positives below t are misses
    fp = len(neg) - np.searchsorted(neg, t, side="left")
    fn = np.searchsorted(pos, t, side="left")
    return (fp + fn).astype(np.int64)


def threshold_error(inst: OneDimInstance, t: float) -> int:
    return int(threshold_errors(inst.positions, inst.labels, [t])[0])


def candidate_thresholds(inst: OneDimInstance) -> np.ndarray:
    return np.append(np.unique(inst.positions), INF)


def _optimal(inst: OneDimInstance, labels, largest: bool) -> tuple[float, int]:
    if inst.N == 0:
        raise EmptyInstanceError("empty instance has no optimal threshold")
    cand = candidate_thresholds(inst)
    errs = threshold_errors(inst.positions, labels, cand)
    best = errs.min()
    hits = np.flatnonzero(errs == best)
    i = hits[-1] if largest else hits[0]
    return float(cand[i]), int(best)


def optimal_threshold_true(inst: OneDimInstance) -> tuple[float, int]:
    """Largest threshold minimising the error on the true labels."""
    return _optimal(inst, inst.labels, largest=True)


def report_array(inst: OneDimInstance, report: Mapping[int, int]) -> np.ndarray:
    try:
        y = np.array([report[i] for i in inst.ids.tolist()], dtype=np.int64)
    except KeyError as e:
        raise ValueError(f"report does not cover document {e.args[0]}") from None
    _check_labels(y)
    return y


def optimal_threshold_report(inst: OneDimInstance, report) -> tuple[float, int]:
    """Smallest threshold minimising the error on reported labels.

    ``report`` is either a mapping id -> label or an array aligned with
    ``inst.ids``.
    """
    y = report_array(inst, report) if isinstance(report, Mapping) else np.asarray(report)
    if len(y) != inst.N:
        raise ValueError("report must cover every document")
    return _optimal(inst, y, largest=False)


def analyze_thresholds(inst: OneDimInstance, report) -> ThresholdAnalysis:
    t, e = optimal_threshold_true(inst)
    ta, ea = optimal_threshold_report(inst, report)
    return ThresholdAnalysis(t, ta, e, ea)


def _truth_of(instance) -> Mapping[int, int]:
    return instance.truth


def recall(outcome: ProtocolOutcome, instance) -> float:
    truth = _truth_of(instance)
    n_plus = sum(1 for v in truth.values() if v == 1)
    if n_plus == 0:
        raise UndefinedRecallError("recall is undefined without positive documents")
    hit = sum(1 for i in outcome.revealed if truth.get(i) == 1)
    return hit / n_plus


def nrd(outcome: ProtocolOutcome, instance) -> int:
    truth = _truth_of(instance)
    return sum(1 for i in outcome.revealed if truth.get(i) == -1)
