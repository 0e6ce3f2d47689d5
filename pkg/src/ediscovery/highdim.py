"""Sampling protocol for label reports on low-dimensional instances.

Trent needs every linear classifier that is optimal for Alice's report.  At
desk scale (d <= 3, n <= 40) these are enumerated exhaustively: every optimal
labelling is produced by some hyperplane through d of the points, with the
points lying on it assigned either way.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import (
    EmptyInstanceError,
    FullReveal,
    Instance,
    LinearModel,
    OneDimInstance,
    ProtocolOutcome,
    ReportReceived,
    Sampled,
    optimal_threshold_report,
    report_array,
)
from .critical import is_separable, max_margin_classifier
from .parties import AliceOracle, BobOracle, CourtOracle
from .protocols import LabelReportConfig, _Session, sampling_constant_label
from .seeding import make_rng
from .simplex import linprog

MAX_DIM = 3
MAX_POINTS = 40
ON_PLANE_TOL = 1e-9


class OracleRegimeError(ValueError):
    pass


@dataclass(frozen=True)
class OptimalClassifierSet:
    classifiers: tuple  # LinearModel, one per distinct labelling
    labelings: np.ndarray  # (m, n) label vectors aligned with the instance
    err_star: int

    def __post_init__(self):
        if not self.classifiers:
            raise ValueError("optimal classifier set cannot be empty")

    def __len__(self):
        return len(self.classifiers)

    def positive_union(self, X) -> np.ndarray:
        return np.any([h.predict(X) == 1 for h in self.classifiers], axis=0)

    def distance(self, X) -> np.ndarray:
        """Euclidean distance to the nearest optimal hyperplane."""
        return np.min([np.abs(h.decision(X)) / np.linalg.norm(h.w) for h in self.classifiers], axis=0)


def _check_regime(instance: Instance):
    if instance.d > MAX_DIM or instance.n > MAX_POINTS:
        raise OracleRegimeError(
            f"exhaustive enumeration needs d <= {MAX_DIM} and n <= {MAX_POINTS}; "
            f"got d={instance.d}, n={instance.n}")
    if instance.n == 0:
        raise EmptyInstanceError("instance has no documents")


def _hyperplane(P: np.ndarray):
    """Normal and offset of the hyperplane through the rows of P, or None if not unique."""
    d = P.shape[1]
    if d == 1:
        return np.ones(1), -float(P[0, 0])
    D = P[1:] - P[0]
    _, sv, Vt = np.linalg.svd(D)
    if np.sum(sv > 1e-10 * max(1.0, sv.max(initial=0.0))) < d - 1:
        return None
    w = Vt[-1]
    return w, -float(w @ P[0])


def candidate_labelings(X: np.ndarray) -> np.ndarray:
    """Every labelling induced by a hyperplane through d points, plus the constants."""
    n, d = X.shape
    out = [np.ones(n, dtype=np.int8), -np.ones(n, dtype=np.int8)]
    for combo in itertools.combinations(range(n), min(d, n)):
        hp = _hyperplane(X[list(combo)])
        if hp is None:
            continue
        w, b = hp
        s = X @ w + b
        on = np.flatnonzero(np.abs(s) <= ON_PLANE_TOL * max(1.0, np.abs(X).max()))
        if len(on) > 12:
            continue
        for o in (1.0, -1.0):
            base = np.where(o * s > 0, 1, -1).astype(np.int8)
            for bits in itertools.product((1, -1), repeat=len(on)):
                lab = base.copy()
                lab[on] = bits
                out.append(lab)
    return np.unique(np.array(out), axis=0)


def _realize(X: np.ndarray, lab: np.ndarray) -> LinearModel | None:
    Xp, Xm = X[lab == 1], X[lab == -1]
    if len(Xm) == 0:
        w = np.zeros(X.shape[1])
        w[0] = 1.0
        return LinearModel(w, -float(X[:, 0].min()) + 1.0)
    if len(Xp) == 0:
        w = np.zeros(X.shape[1])
        w[0] = 1.0
        return LinearModel(w, -float(X[:, 0].max()) - 1.0)
    if not is_separable(Xp, Xm):
        return None
    return max_margin_classifier(Xp, Xm)


def enumerate_optimal_classifiers(instance: Instance, labels=None) -> OptimalClassifierSet:
    """All classification-distinct linear classifiers of minimum error.

    ``labels`` overrides the instance labels (used for Alice's report).
    Each distinct optimal labelling is represented by its max-margin
    separator.
    """
    _check_regime(instance)
    y = instance.y if labels is None else np.asarray(labels)
    X = instance.X
    labs = candidate_labelings(X)
    errs = (labs != y).sum(axis=1)
    order = np.argsort(errs, kind="stable")
    models, kept, best = [], [], None
    for r in order:
        if best is not None and errs[r] > best:
            break
        h = _realize(X, labs[r])
        if h is None or not np.array_equal(h.predict(X), labs[r]):
            continue
        best = int(errs[r])
        models.append(h)
        kept.append(labs[r])
    return OptimalClassifierSet(tuple(models), np.array(kept, dtype=np.int64), best)


def check_consistency(h_star: LinearModel, optima: OptimalClassifierSet, instance: Instance) -> bool:
    """Does h_star's positive side contain the intersection of the optima's positive sides?

    Checked on the instance points and exactly over the whole intersection
    polyhedron by minimising h_star's decision value over it.
    """
    X = instance.X
    inside = np.all([h.decision(X) >= 0 for h in optima.classifiers], axis=0)
    if np.any(h_star.decision(X[inside]) < 0):
        return False
    W = np.array([h.w for h in optima.classifiers])
    b = np.array([h.b for h in optima.classifiers])
    res = linprog(h_star.w, -W, b, bounds=[(None, None)] * instance.d)
    if res.status == "infeasible":
        return True
    if res.status == "unbounded":
        return False
    return res.fun + h_star.b >= -1e-9


def _report(instance: Instance, alice: AliceOracle) -> np.ndarray:
    if alice.behavior == "truthful":
        return instance.y.copy()
    if alice.behavior == "scripted":
        return report_array(instance, alice.script)
    if instance.d == 1:
        return alice.report_labels(OneDimInstance.from_instance(instance))
    raise ValueError(f"strategy {alice} is only defined on 1-D instances")


@dataclass(frozen=True)
class WalkPlan:
    """What Trent shows unconditionally and the ordered sampling walk."""

    report: np.ndarray
    optima: OptimalClassifierSet
    initial: np.ndarray  # bool mask
    walk: np.ndarray  # indices in walk order
    probabilities: np.ndarray  # p for walk[r]
    c: float


def plan_walk(instance: Instance, report, cfg: LabelReportConfig) -> WalkPlan:
    report = np.asarray(report)
    optima = enumerate_optimal_classifiers(instance, report)
    X = instance.X
    initial = (report == 1) | optima.positive_union(X)
    rest = np.flatnonzero(~initial)
    dist = optima.distance(X[rest])
    walk = rest[np.lexsort((instance.ids[rest], dist))]
    c = sampling_constant_label(optima.err_star, cfg.k, cfg.delta)
    # n(x): 1-based rank among the walked negatives
    p = np.minimum(1.0, c / np.arange(1, len(walk) + 1))
    return WalkPlan(report, optima, initial, walk, p, c)


def run_highdim_sampling(instance: Instance, alice: AliceOracle, bob: BobOracle | None = None,
                         court: CourtOracle | None = None,
                         cfg: LabelReportConfig = LabelReportConfig(), direction=None,
                         rng=None) -> ProtocolOutcome:
    """Label verification with all optimal classifiers of the report.

    Bob sees every Alice-positive and every point some optimal classifier
    calls positive.  The rest are walked by increasing distance to the
    nearest optimal hyperplane (ties by id); the ``i``-th is shown with
    probability ``min(1, c/i)``.  A court-confirmed hidden positive reveals
    everything.  ``direction`` is recorded but does not change the walk.
    """
    _check_regime(instance)
    if direction is not None and not np.any(direction):
        raise ValueError("direction must be non-zero")
    bob = bob or BobOracle()
    court = court or CourtOracle()
    rng = make_rng(rng)
    plan = plan_walk(instance, _report(instance, alice), cfg)
    f_A = plan.report
    s = _Session(instance, bob, court)
    s.events.append(ReportReceived(instance.n))

    def check(i) -> bool:
        if s.reveal(i) != f_A[i]:
            return s.to_court(i) == 1 and f_A[i] == -1
        return False

    by_id = np.argsort(instance.ids, kind="stable")
    detected = any([check(i) for i in by_id if plan.initial[i]])
    reason = "hidden positive among optimal positives"
    if not detected:
        for i, p in zip(plan.walk, plan.probabilities):
            if rng.random() < p:
                s.events.append(Sampled(int(instance.ids[i]), float(p)))
                if check(i):
                    detected, reason = True, "sampled hidden positive"
                    break
    if detected:
        s.full_reveal = True
        s.events.append(FullReveal(reason))
        for i in by_id:
            if i not in s.revealed:
                check(i)
    if direction is None:
        direction = np.mean([h.w / np.linalg.norm(h.w) for h in plan.optima.classifiers], axis=0)
    return s.outcome(f_A, err_A=plan.optima.err_star, c=plan.c, detected=detected,
                     n_optima=len(plan.optima), direction=np.asarray(direction, dtype=float))


def simulate_highdim_sampling(instance: Instance, report, cfg: LabelReportConfig,
                              U: np.ndarray) -> dict[str, np.ndarray]:
    """Recall, NRD and detection of ``run_highdim_sampling`` per row of ``U``
    (perfect Bob and court)."""
    plan = plan_walk(instance, report, cfg)
    y = instance.y
    f_A = plan.report
    T = len(U)
    n_plus, n_minus = instance.n_plus, instance.n_minus
    if np.any(plan.initial & (f_A == -1) & (y == 1)):
        return {"recall": np.ones(T), "nrd": np.full(T, n_minus), "detected": np.ones(T, dtype=bool)}
    m = len(plan.walk)
    S = U[:, :m] < plan.probabilities
    hidden = y[plan.walk] == 1
    detected = (S & hidden).any(axis=1)
    base_pos = int((plan.initial & (y == 1)).sum())
    base_neg = int((plan.initial & (y == -1)).sum())
    rec = np.where(detected, 1.0, base_pos / n_plus if n_plus else np.nan)
    nrd_ = np.where(detected, n_minus, base_neg + (S & ~hidden).sum(axis=1))
    return {"recall": rec, "nrd": nrd_, "detected": detected}


def projected_probabilities(instance: Instance, report, cfg: LabelReportConfig, v,
                            threshold: float) -> dict[int, float]:
    """Sampling probabilities of the 1-D label-report walk on the projection onto ``v``.

    Points are placed at ``v.x``; Alice-negatives strictly below
    ``threshold`` are walked top-down with ``min(1, c/rank)`` using the same
    constant ``c`` as the high-dimensional walk.  Returns id -> probability.
    """
    report = np.asarray(report)
    pos = instance.X @ np.asarray(v, dtype=float)
    line = OneDimInstance(instance.ids, pos, report)
    order = line.walk_order()
    walk = order[(report[order] == -1) & (pos[order] < threshold)]
    optima = enumerate_optimal_classifiers(instance, report)
    c = sampling_constant_label(optima.err_star, cfg.k, cfg.delta)
    return {int(instance.ids[i]): min(1.0, c / r) for r, i in enumerate(walk, start=1)}


def highdim_probabilities(plan: WalkPlan, instance: Instance) -> dict[int, float]:
    return {int(instance.ids[i]): float(p) for i, p in zip(plan.walk, plan.probabilities)}


def one_dim_report_threshold(instance: Instance, report) -> float:
    return optimal_threshold_report(OneDimInstance.from_instance(instance), report)[0]


def tangent_threshold(optima: OptimalClassifierSet, v) -> float:
    """min v.x over the intersection of the optima's positive sides (the
    projected position of the parallel hyperplane tangent to it)."""
    v = np.asarray(v, dtype=float)
    W = np.array([h.w for h in optima.classifiers])
    b = np.array([h.b for h in optima.classifiers])
    res = linprog(v, -W, b, bounds=[(None, None)] * len(v))
    if res.status == "infeasible":
        return np.inf
    if res.status == "unbounded":
        return -np.inf
    return float(res.fun)
