import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog as highs

from ediscovery.simplex import linprog


def test_textbook_max():
    # max 3x + 5y  s.t. x <= 4, 2y <= 12, 3x + 2y <= 18
    res = linprog([-3, -5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert res.success and np.allclose(res.x, [2, 6]) and np.isclose(res.fun, -36)


def test_equality_and_free_bounds():
    res = linprog([1, 1], A_eq=[[1, -1]], b_eq=[2], bounds=[(None, None), (0, None)])
    assert res.success and np.allclose(res.x, [2, 0])


def test_infeasible_with_certificate():
    A, b = np.array([[1.0, 1.0], [-1.0, -1.0]]), np.array([1.0, -2.0])
    res = linprog([0, 0], A, b)
    assert res.status == "infeasible"
    y = res.farkas
    # y <= 0 on inequality rows, y.A <= 0 column-wise and y.b > 0
    assert np.all(y <= 1e-12) and np.all(y @ A <= 1e-9) and y @ b > 0


def test_unbounded():
    assert linprog([-1, 0], [[0, 1]], [1]).status == "unbounded"


def test_degenerate_does_not_cycle():
    # a classic cycling example for the plain largest-coefficient rule
    c = [-10, 57, 9, 24]
    A = [[0.5, -5.5, -2.5, 9], [0.5, -1.5, -0.5, 1], [1, 0, 0, 0]]
    res = linprog(c, A, [0, 0, 1])
    assert res.success and np.isclose(res.fun, -1)


@given(st.integers(0, 10_000))
def test_matches_highs(seed):
    rng = np.random.default_rng(seed)
    m, k = rng.integers(1, 6), rng.integers(1, 5)
    A = rng.normal(size=(m, k))
    b = rng.uniform(0.1, 2.0, size=m)
    c = rng.normal(size=k)
    ours = linprog(c, A, b, bounds=[(0, 3)] * k)
    ref = highs(c, A, b, bounds=[(0, 3)] * k, method="highs")
    assert ours.success == (ref.status == 0)
    if ours.success:
        assert ours.fun == pytest.approx(ref.fun, abs=1e-7)
