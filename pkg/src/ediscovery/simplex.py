"""Small dense two-phase simplex solver.

Solves ``min c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi`` on a
full numpy tableau.  Pricing is Dantzig's rule; after a run of degenerate
pivots it switches to Bland's rule, which cannot cycle, and switches back once
the objective moves again.  Intended for the few-hundred-constraint problems
used in this package.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9
DEGENERATE_RUN = 8


class LPError(RuntimeError):
    """Numerical failure of the solver (not infeasibility)."""


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    fun: float | None
    nit: int
    # on infeasibility: y over the (A_ub rows, A_eq rows) with y.A <= 0 on
    # every column, y <= 0 on inequality rows and y.b > 0 (a Farkas
    # certificate).  Stated for the default bounds x >= 0.
    farkas: np.ndarray | None = None

    @property
    def success(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    def __init__(self, T: np.ndarray, basis: np.ndarray):
        self.T = T  # last row is the objective row: reduced costs | -value
        self.basis = basis
        self.nit = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        # rounding can leave basic values a hair below zero; that breaks the
        # ratio test (and Bland's guarantee) on degenerate problems
        rhs = T[:-1, -1]
        rhs[(rhs < 0) & (rhs > -FEAS_TOL)] = 0.0
        self.basis[r] = j
        self.nit += 1

    def run(self, allowed: np.ndarray, max_iter: int) -> str:
        T = self.T
        m = T.shape[0] - 1
        degenerate = 0
        for _ in range(max_iter):
            cost = T[-1, :-1]
            cand = np.flatnonzero((cost < -FEAS_TOL * 10) & allowed)
            if len(cand) == 0:
                return "optimal"
            if degenerate >= DEGENERATE_RUN:
                j = cand[0]  # Bland: smallest eligible index
            else:
                j = cand[np.argmin(cost[cand])]
            colj = T[:m, j]
            pos = colj > PIVOT_TOL
            if not pos.any():
                return "unbounded"
            rhs = T[:m, -1]
            ratios = np.full(m, np.inf)
            ratios[pos] = rhs[pos] / colj[pos]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + 1e-12 * max(1.0, abs(best)))
            # Bland leaving rule: smallest basic variable index among ties
            r = ties[np.argmin(self.basis[ties])]
            degenerate = degenerate + 1 if best <= 1e-12 else 0
            self.pivot(r, j)
        raise LPError("simplex iteration limit reached")


def _standard_form(c, A_ub, b_ub, A_eq, b_eq, bounds):
    """Rewrite to ``min c'.z, A z (<=|=) b, z >= 0`` and a map back to x."""
    n = len(c)
    if bounds is None:
        bounds = [(0.0, None)] * n
    elif isinstance(bounds, tuple) and len(bounds) == 2 and not isinstance(bounds[0], tuple):
        bounds = [bounds] * n
    cols = []  # (orig index, sign, offset)
    extra_ub = []  # (column index in z, upper bound) for boxed vars
    for i, (lo, hi) in enumerate(bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if np.isfinite(lo):
            cols.append((i, 1.0, lo))
            if np.isfinite(hi):
                extra_ub.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            cols.append((i, -1.0, hi))
        else:
            cols.append((i, 1.0, 0.0))
            cols.append((i, -1.0, 0.0))
    k = len(cols)
    M = np.zeros((n, k))
    off = np.zeros(n)
    for z, (i, s, o) in enumerate(cols):
        M[i, z] = s
        off[i] = o

    def conv(A, b):
        A = np.zeros((0, n)) if A is None else np.atleast_2d(np.asarray(A, dtype=float))
        b = np.zeros(0) if b is None else np.asarray(b, dtype=float).reshape(-1)
        return A @ M, b - A @ off

    Aub, bub = conv(A_ub, b_ub)
    if extra_ub:
        E = np.zeros((len(extra_ub), k))
        for r, (z, u) in enumerate(extra_ub):
            E[r, z] = 1.0
        Aub = np.vstack([Aub, E])
        bub = np.concatenate([bub, [u for _, u in extra_ub]])
    Aeq, beq = conv(A_eq, b_eq)
    cz = np.asarray(c, dtype=float) @ M
    return cz, Aub, bub, Aeq, beq, M, off


def linprog(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
            max_iter: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=float).reshape(-1)
    cz, Aub, bub, Aeq, beq, M, off = _standard_form(c, A_ub, b_ub, A_eq, b_eq, bounds)
    k = len(cz)
    m_ub, m_eq = len(bub), len(beq)
    m = m_ub + m_eq
    if m == 0:
        if np.any(cz < 0):
            return LPResult("unbounded", None, None, 0)
        x = off.copy()
        return LPResult("optimal", x, float(c @ x), 0)

    # columns: structural (k) | slacks (m_ub) | artificials (m) | rhs
    A = np.zeros((m, k + m_ub))
    A[:m_ub, :k] = Aub
    A[:m_ub, k:] = np.eye(m_ub)
    A[m_ub:, :k] = Aeq
    b = np.concatenate([bub, beq])
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    # scale rows so the tolerances are meaningful
    scale = np.maximum(np.abs(A).max(axis=1), 1.0)
    A /= scale[:, None]
    b /= scale

    n_struct = k + m_ub
    basis = np.full(m, -1, dtype=np.int64)
    need_art = []
    for r in range(m):
        if r < m_ub and not neg[r]:
            basis[r] = k + r  # its slack is a feasible starting basic variable
        else:
            need_art.append(r)
    n_art = len(need_art)
    T = np.zeros((m + 1, n_struct + n_art + 1))
    T[:m, :n_struct] = A
    T[:m, -1] = b
    for a, r in enumerate(need_art):
        T[r, n_struct + a] = 1.0
        basis[r] = n_struct + a
    tab = _Tableau(T, basis)

    if n_art:
        # phase 1: minimise the sum of artificials
        T[-1, :] = 0.0
        T[-1, n_struct:n_struct + n_art] = 1.0
        for r in need_art:
            T[-1] -= T[r]
        allowed = np.ones(n_struct + n_art, dtype=bool)
        tab.run(allowed, max_iter)
        if -T[-1, -1] > FEAS_TOL * max(1.0, np.abs(b).max()):
            # phase-1 duals: 1 - reduced cost on artificial columns, minus the
            # reduced cost on slack columns
            y = np.zeros(m)
            art_of = {r: n_struct + a for a, r in enumerate(need_art)}
            for r in range(m):
                y[r] = 1.0 - T[-1, art_of[r]] if r in art_of else -T[-1, k + r]
            y = y * np.where(neg, -1.0, 1.0) / scale
            n_box = len(bub) - (len(b_ub) if b_ub is not None else 0)
            y = np.delete(y, np.s_[m_ub - n_box:m_ub])
            return LPResult("infeasible", None, None, tab.nit, farkas=y)
        # drive remaining artificials out of the basis
        keep = np.ones(m, dtype=bool)
        for r in range(m):
            if basis[r] >= n_struct:
                row = T[r, :n_struct]
                nz = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if len(nz):
                    tab.pivot(r, nz[0])
                else:
                    keep[r] = False  # redundant equality
        if not keep.all():
            rows = np.append(np.flatnonzero(keep), m)
            tab.T = T = T[rows]
            tab.basis = basis = basis[keep]
            m = len(basis)
        T = tab.T = np.delete(tab.T, np.s_[n_struct:n_struct + n_art], axis=1)

    # phase 2
    T[-1, :] = 0.0
    T[-1, :k] = cz
    for r in range(m):
        j = tab.basis[r]
        if T[-1, j] != 0.0:
            T[-1] -= T[-1, j] * T[r]
    status = tab.run(np.ones(n_struct, dtype=bool), max_iter)
    if status == "unbounded":
        return LPResult("unbounded", None, None, tab.nit)
    z = np.zeros(n_struct)
    z[tab.basis] = T[:m, -1]
    x = M @ z[:k] + off
    return LPResult("optimal", x, float(c @ x), tab.nit)
