import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from crowdsweep.errors import EmptyInterval
from crowdsweep.optimizer import Quadratic1D, argmin_quadratic, minimize_scalar, solve_small_qp

reals = st.floats(-50, 50, allow_nan=False, allow_infinity=False)


def test_vertex_is_clamped():
    q = Quadratic1D(1.0, -4.0, 0.0, 0.0, 1.0)
    assert argmin_quadratic(q) == (1.0, -3.0)
    assert argmin_quadratic(Quadratic1D(1.0, -4.0, 0.0))[0] == 2.0
    with pytest.raises(EmptyInterval):
        argmin_quadratic(Quadratic1D(1.0, 0.0, 0.0, 2.0, 1.0))


def test_affine_residual_form():
    q = Quadratic1D.from_affine_residuals([3.0, -1.0], [-1.0, 0.5], weight=0.25, linear=0.1)
    x = 0.7
    r = np.array([3.0, -1.0]) + x * np.array([-1.0, 0.5])
    assert q(x) == pytest.approx(0.5 * r @ r + 0.25 * x * x + 0.1 * x)


@given(st.floats(0.01, 10), reals, reals, reals)
def test_argmin_beats_neighbours(c2, c1, lo, width):
    hi = lo + abs(width)
    q = Quadratic1D(c2, c1, 0.0, lo, hi)
    x, v = argmin_quadratic(q)
    assert lo <= x <= hi
    for y in np.linspace(lo, hi, 11):
        assert v <= q(y) + 1e-9 * (1 + abs(v))


def test_minimize_scalar_finds_interior_and_kinks():
    x, v = minimize_scalar(lambda t: (t - 1.234567) ** 2, 0.0, 5.0)
    assert x == pytest.approx(1.234567, abs=1e-7)
    x, _ = minimize_scalar(lambda t: abs(t - 2.0) + 1.0, 0.0, 3.0)
    assert x == pytest.approx(2.0, abs=1e-6)
    assert minimize_scalar(lambda t: 1.0, 0.0, 1.0) == (0.0, 1.0)


def test_qp_active_sets():
    Q = np.eye(2)
    c = np.array([-2.0, -2.0])
    x, v = solve_small_qp(Q, c)
    assert np.allclose(x, [2.0, 2.0])
    # x1 + x2 <= 1 binds
    x, v = solve_small_qp(Q, c, [[1.0, 1.0]], [1.0])
    assert np.allclose(x, [0.5, 0.5])
    # infeasible: x1 <= -1 and -x1 <= -1
    assert solve_small_qp(Q, c, [[1.0, 0.0], [-1.0, 0.0]], [-1.0, -1.0]) is None


@given(st.lists(reals, min_size=3, max_size=3), st.lists(reals, min_size=3, max_size=3))
def test_qp_matches_scipy(cvec, hvec):
    from scipy.optimize import minimize
    Q = np.diag([1.0, 2.0, 3.0])
    c = np.array(cvec)
    G = -np.eye(3)
    h = np.minimum(np.array(hvec), 0.0)  # x >= -h keeps the set non-empty
    out = solve_small_qp(Q, c, G, h)
    assert out is not None
    ref = minimize(lambda x: 0.5 * x @ Q @ x + c @ x, np.zeros(3) - h, jac=lambda x: Q @ x + c,
                   bounds=[(-hi, None) for hi in h], method="L-BFGS-B",
                   options={"ftol": 1e-15, "gtol": 1e-12})
    assert out[1] <= ref.fun + 1e-6 * (1 + abs(ref.fun))
