from fractions import Fraction

import numpy as np
import pytest
from numpy.testing import assert_allclose

from symten.geom import d_op, delta_op, euclidean_chart, laplace_op
from symten.poly import PolyTensorField, delta_d_power_rhs, j_d_power_rhs


def test_shape_validation():
    with pytest.raises(ValueError):
        PolyTensorField(2, 1, np.zeros((3, 3, 3)))
    with pytest.raises(ValueError):
        PolyTensorField(2, 0, np.zeros((3, 4)))


def test_examples():
    # u = x dx + y dy
    u = PolyTensorField.from_terms(2, 1, 1, {((1, 0), (0,)): 1, ((0, 1), (1,)): 1}, exact=True)
    assert u.delta().at([0.3, -0.2]).comps[0] == pytest.approx(2.0)
    assert_allclose(u.d().at([0.5, 0.5]).full(), np.eye(2))
    r2 = PolyTensorField.from_terms(2, 0, 2, {((2, 0), ()): 1, ((0, 2), ()): 1})
    assert r2.laplace().at([0.1, 0.9]).comps[0] == pytest.approx(4.0)


def test_evaluate_and_partial(rng):
    u = PolyTensorField.random(rng, 2, 1, 3)
    X = rng.standard_normal((4, 2))
    h = 1e-6
    e = np.array([h, 0.0])
    fd = (u.evaluate(X + e) - u.evaluate(X - e)) / (2 * h)
    assert_allclose(u.partial(0).evaluate(X), fd, rtol=1e-7, atol=1e-7)


@pytest.mark.parametrize("m", [0, 1, 2])
def test_matches_autodiff_operators(rng, m):
    chart = euclidean_chart(2)
    u = PolyTensorField.random(rng, 2, m, 3)
    X = chart.sample_points(5, rng)
    f = u.to_tensor_field(chart)
    assert_allclose(d_op(f).evaluate(X), u.d().evaluate(X), atol=1e-12)
    assert_allclose(laplace_op(f).evaluate(X), u.laplace().evaluate(X), atol=1e-11)
    if m:
        assert_allclose(delta_op(f).evaluate(X), u.delta().evaluate(X), atol=1e-12)
    # evaluation at the origin keeps derivatives finite
    assert np.all(np.isfinite(d_op(f).evaluate(np.zeros((1, 2)))))


def test_exact_arithmetic(rng):
    u = PolyTensorField.random(rng, 3, 2, 2, exact=True)
    assert u.exact and isinstance(u.coeffs.flat[0], Fraction)
    assert (u.p() + u.q() - u).is_zero()
    assert u.p().j().is_zero()
    assert (u * Fraction(1, 3) * 3 - u).is_zero()


@pytest.mark.parametrize("n,m,k,l", [(2, 1, 1, 1), (2, 1, 2, 1), (3, 1, 1, 2), (2, 2, 2, 2), (3, 0, 2, 1)])
def test_delta_d_power_identity(rng, n, m, k, l):
    u = PolyTensorField.random(rng, n, m, 2 * k + 1, exact=True)
    lhs = u.power("d", k).power("delta", l)
    rhs = delta_d_power_rhs(u, k, l)
    assert (lhs - rhs).is_zero()


@pytest.mark.parametrize("n,m,k", [(2, 1, 1), (3, 1, 2), (2, 2, 1), (3, 0, 2), (2, 2, 2)])
def test_j_d_power_identity(rng, n, m, k):
    u = PolyTensorField.random(rng, n, m, k + 2, exact=True)
    assert (u.power("d", k).j() - j_d_power_rhs(u, k)).is_zero()


def test_j_d_power_small_rank_rejected(rng):
    with pytest.raises(ValueError):
        j_d_power_rhs(PolyTensorField.random(rng, 2, 0, 1), 1)
