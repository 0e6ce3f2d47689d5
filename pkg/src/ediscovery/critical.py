"""Critical points of a linearly separable instance.

A negative document is critical when relabelling it positive keeps the
instance separable.  The fast path maps the points through a fractional
linear map that sends a separating hyperplane to infinity; the critical points
are then exactly the negatives whose images are extreme points, which
Clarkson's output-sensitive algorithm finds with one small LP per point plus
one per extreme point.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import Instance, LinearModel
from .simplex import linprog

SEPARATION_TOL = 1e-9
DENOM_TOL = 1e-9


class NotRealizableError(ValueError):
    pass


class ProjectiveDegeneracyError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SeparationCertificate:
    v: np.ndarray
    margin: float


# -- separability and max margin ----------------------------------------------

def _margin_lp(Xp: np.ndarray, Xm: np.ndarray):
    """min ||w||_inf  s.t.  w.x + b >= 1 on Xp, <= -1 on Xm.  Returns (w, b) or None."""
    d = Xp.shape[1] if len(Xp) else Xm.shape[1]
    Y = np.concatenate([np.ones(len(Xp)), -np.ones(len(Xm))])
    X = np.vstack([Xp, Xm])
    # variables: w (d, free), b (free), s >= 0
    A = np.zeros((len(X) + 2 * d, d + 2))
    A[: len(X), :d] = -Y[:, None] * X
    A[: len(X), d] = -Y
    # margins tightened by distinct ~1e-9 amounts: equal right-hand sides
    # make every ratio test a tie and the simplex stalls
    tight = 1.0 + 1e-9 * np.random.default_rng(len(X)).random(len(X))
    rhs = np.concatenate([-tight, np.zeros(2 * d)])
    for l in range(d):
        A[len(X) + 2 * l, l], A[len(X) + 2 * l, d + 1] = 1.0, -1.0
        A[len(X) + 2 * l + 1, l], A[len(X) + 2 * l + 1, d + 1] = -1.0, -1.0
    c = np.zeros(d + 2)
    c[-1] = 1.0
    res = linprog(c, A, rhs, bounds=[(None, None)] * (d + 1) + [(0, None)])
    if not res.success:
        return None
    return res.x[:d], float(res.x[d])


def is_separable(X_plus, X_minus) -> bool:
    Xp = np.asarray(X_plus, dtype=float)
    Xm = np.asarray(X_minus, dtype=float)
    if len(Xp) == 0 or len(Xm) == 0:
        return True
    return _margin_lp(Xp, Xm) is not None


def max_margin_classifier(X_plus, X_minus) -> LinearModel:
    """Hard-margin linear classifier: w.x + b >= 1 on X_plus, <= -1 on X_minus.

    An LP (minimum infinity-norm) gives a feasible separator, then SLSQP
    minimises ||w||^2 from that start.  If the refinement fails the LP
    solution is kept.
    """
    Xp = np.atleast_2d(np.asarray(X_plus, dtype=float))
    Xm = np.atleast_2d(np.asarray(X_minus, dtype=float))
    if Xp.size == 0 or Xm.size == 0:
        raise ValueError("both classes must be non-empty")
    lp = _margin_lp(Xp, Xm)
    if lp is None:
        raise NotRealizableError("instance is not linearly separable")
    w0, b0 = lp
    X = np.vstack([Xp, Xm])
    Y = np.concatenate([np.ones(len(Xp)), -np.ones(len(Xm))])
    Z = np.hstack([X, np.ones((len(X), 1))]) * Y[:, None]
    d = X.shape[1]

    res = minimize(
        lambda z: 0.5 * z[:d] @ z[:d],
        np.append(w0, b0),
        jac=lambda z: np.append(z[:d], 0.0),
        constraints=[{"type": "ineq", "fun": lambda z: Z @ z - 1.0, "jac": lambda z: Z}],
        method="SLSQP",
        options={"maxiter": 500, "ftol": 1e-12},
    )
    z = res.x if res.success else np.append(w0, b0)
    if (Z @ z).min() < 1.0 - 1e-7 or not np.any(z[:d]):
        z = np.append(w0, b0)
    return LinearModel(z[:d], z[d])


class MaxMarginClassifier(ClassifierMixin, BaseEstimator):
    """Hard-margin linear SVM for separable data (labels -1/+1)."""

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = np.array([-1, 1])
        if not np.isin(y, (-1, 1)).all():
            raise ValueError("labels must be -1 or +1")
        self.model_ = max_margin_classifier(X[y == 1], X[y == -1])
        self.coef_ = self.model_.w.reshape(1, -1)
        self.intercept_ = np.array([self.model_.b])
        return self

    def decision_function(self, X):
        check_is_fitted(self)
        return self.model_.decision(check_array(X))

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, 1, -1)


# -- projective map ------------------------------------------------------------

def orthogonal_completion(w, b) -> np.ndarray:
    """Orthogonal (d+1)x(d+1) matrix whose first column is (b, w)/||(b, w)||.

    Built from one Householder reflector mapping e1 to the unit vector.
    """
    v = np.concatenate([[float(b)], np.asarray(w, dtype=float).reshape(-1)])
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("(b, w) must be non-zero")
    q = v / norm
    u = q.copy()
    u[0] -= 1.0
    uu = u @ u
    n = len(v)
    if uu < 1e-30:
        return np.eye(n)
    # H = I - 2 u u^T / u^T u is symmetric, orthogonal and H e1 = q
    return np.eye(n) - 2.0 * np.outer(u, u) / uu


def apply_projective_map(X_minus, X_plus, U) -> np.ndarray:
    """Rows of [1 | X] U divided by their first entry, first column dropped.

    Rows are stacked negatives first, then positives.
    """
    X_minus = np.asarray(X_minus, dtype=float)
    X_plus = np.asarray(X_plus, dtype=float)
    d = U.shape[0] - 1
    X = np.vstack([X_minus.reshape(-1, d), X_plus.reshape(-1, d)])
    V = np.hstack([np.ones((len(X), 1)), X]) @ U
    den = V[:, 0]
    if np.any(np.abs(den) < DENOM_TOL):
        raise ProjectiveDegeneracyError(
            "a point lies (numerically) on the separating hyperplane; use a larger-margin classifier")
    return V[:, 1:] / den[:, None]


# -- extreme points --------------------------------------------------------------

_PERTURB = 1e-11


def _perturbation(d: int) -> np.ndarray:
    return np.random.default_rng(d).standard_normal(d)


def separation_lp(x_j, hull_points) -> SeparationCertificate | None:
    """Find v with v.x_i <= v.x_j - margin for every hull point, or None.

    Solves the membership LP  lambda >= 0,  sum lambda_i (x_i - x_j) = 0,
    sum lambda_i = 1  (differences rescaled to unit size).  Feasible means
    x_j lies in the hull; otherwise the phase-1 Farkas certificate (u, u0)
    satisfies u.(x_i - x_j) + u0 <= 0 < u0, so v = u separates.
    """
    x_j = np.asarray(x_j, dtype=float).reshape(-1)
    H = np.atleast_2d(np.asarray(hull_points, dtype=float))
    d = len(x_j)
    if H.size == 0:
        v = np.zeros(d)
        v[0] = 1.0
        return SeparationCertificate(v, 1.0)
    D = H - x_j
    scale = np.abs(D).max()
    if scale == 0:
        return None
    D = D / scale
    A_eq = np.vstack([D.T, np.ones(len(D))])
    b_eq = np.zeros(d + 1)
    b_eq[-1] = 1.0
    # a fixed tiny perturbation of the zero right-hand side breaks the heavy
    # degeneracy; the margin below is checked on the unperturbed points
    b_eq[:d] = _PERTURB * _perturbation(d)
    res = linprog(np.zeros(len(D)), A_eq=A_eq, b_eq=b_eq)
    if res.success:
        return None
    if res.status != "infeasible" or res.farkas is None:
        raise RuntimeError(f"separation LP failed: {res.status}")
    v = res.farkas[:d]
    norm = np.abs(v).max()
    if norm == 0:
        return None
    v = v / norm
    margin = -float((D @ v).max())
    if margin <= SEPARATION_TOL:
        return None
    return SeparationCertificate(v, margin * scale)


def _lexmax(P: np.ndarray, cand: np.ndarray) -> int:
    # lexicographic max over rows; np.lexsort sorts by the last key first
    keys = tuple(P[cand, l] for l in range(P.shape[1] - 1, -1, -1))
    return int(cand[np.lexsort(keys)[-1]])


def extremal_points(points, stats: dict | None = None) -> np.ndarray:
    """Indices of the extreme points of the convex hull of ``points``.

    Clarkson's algorithm: start from the point with the largest first
    coordinate; for each point solve a separation LP against the current
    extreme set and, while one exists, add the maximiser of the separating
    direction.  Exact duplicates are collapsed and re-expanded.
    """
    P = np.atleast_2d(np.asarray(points, dtype=float))
    n = len(P)
    if stats is not None:
        stats.setdefault("lp_solves", 0)
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    U, first, inverse = np.unique(P, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    # np.unique sorts rows lexicographically; process in original order instead
    order = np.argsort(first)
    U = U[order]
    remap = np.empty_like(order)
    remap[order] = np.arange(len(order))
    inverse = remap[inverse]
    u = len(U)
    in_I = np.zeros(u, dtype=bool)
    in_I[_lexmax(U, np.arange(u))] = True
    lp = 0
    for j in range(u):
        while not in_I[j]:
            cert = separation_lp(U[j], U[in_I])
            lp += 1
            if cert is None:
                break
            rest = np.flatnonzero(~in_I)
            sc = U[rest] @ cert.v
            top = sc.max()
            tie = rest[sc >= top - 1e-12 * max(1.0, abs(top))]
            in_I[_lexmax(U, tie)] = True
    if stats is not None:
        stats["lp_solves"] += lp
    return np.flatnonzero(in_I[inverse])


# -- critical points -------------------------------------------------------------

def _split(instance: Instance):
    neg = np.flatnonzero(instance.y == -1)
    pos = np.flatnonzero(instance.y == 1)
    return neg, pos


def critical_points_fast(instance: Instance, stats: dict | None = None,
                         model: LinearModel | None = None) -> set[int]:
    """Critical negative ids via the projective map and extreme points."""
    neg, pos = _split(instance)
    if len(neg) == 0:
        return set()
    X = instance.X
    if len(pos) == 0:
        # any extreme negative can be flipped on its own
        idx = extremal_points(X[neg], stats)
        return {int(instance.ids[neg[i]]) for i in idx}
    if model is None:
        model = max_margin_classifier(X[pos], X[neg])
    U = orthogonal_completion(model.w, model.b)
    if np.any(model.decision(X[pos]) <= 0) or np.any(model.decision(X[neg]) >= 0):
        raise NotRealizableError("classifier does not strictly separate the instance")
    V = apply_projective_map(X[neg], X[pos], U)
    idx = extremal_points(V, stats)
    return {int(instance.ids[neg[i]]) for i in idx if i < len(neg)}


def critical_points_naive(instance: Instance) -> set[int]:
    """Reference: one strict-separability LP per negative (HiGHS backend)."""
    from scipy.optimize import linprog as highs

    neg, pos = _split(instance)
    X = instance.X
    if len(pos) and len(neg) and not _highs_separable(X[pos], X[neg], highs):
        raise NotRealizableError("instance is not linearly separable")
    out = set()
    for a, i in enumerate(neg):
        rest = np.delete(neg, a)
        if _highs_separable(np.vstack([X[pos], X[[i]]]), X[rest], highs):
            out.add(int(instance.ids[i]))
    return out


def _highs_separable(Xp, Xm, highs) -> bool:
    if len(Xp) == 0 or len(Xm) == 0:
        return True
    d = Xp.shape[1]
    X = np.vstack([Xp, Xm])
    Y = np.concatenate([np.ones(len(Xp)), -np.ones(len(Xm))])
    A = -Y[:, None] * np.hstack([X, np.ones((len(X), 1))])
    res = highs(np.zeros(d + 1), A_ub=A, b_ub=-np.ones(len(X)),
                bounds=[(None, None)] * (d + 1), method="highs")
    return res.status == 0


def nrd_ratio(instance: Instance, critical: set[int]) -> float:
    """Non-responsive disclosure of the critical-points protocol over n-."""
    return len(critical) / instance.n_minus if instance.n_minus else 0.0


class CriticalPoints(BaseEstimator):
    """Estimator wrapper: ``fit(X, y)`` finds the critical negatives.

    Attributes after fit: ``critical_indices_`` (row indices into X),
    ``critical_mask_``, ``classifier_`` and ``n_lp_solves_``.
    """

    def __init__(self, method: str = "fast"):
        self.method = method

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        inst = Instance(np.arange(len(X)), X, y)
        stats: dict = {}
        if self.method == "fast":
            crit = critical_points_fast(inst, stats)
        elif self.method == "naive":
            crit = critical_points_naive(inst)
        else:
            raise ValueError(f"unknown method {self.method!r}")
        self.critical_indices_ = np.array(sorted(crit), dtype=np.int64)
        self.critical_mask_ = np.isin(np.arange(len(X)), self.critical_indices_)
        self.n_lp_solves_ = stats.get("lp_solves", 0)
        return self

    def transform(self, X):
        """Rows of the training set that must be revealed (critical negatives)."""
        check_is_fitted(self)
        X = check_array(X)
        return X[self.critical_mask_]
