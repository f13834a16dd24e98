import jax.numpy as jnp
import numpy as np
import pytest
from numpy.testing import assert_allclose

from symten.ckt import (
    ck_dimension_bound,
    ck_residual,
    ckt_from_holomorphic,
    constrained_ck_kernel,
    cr_residual,
    geodesic_generator_2d,
    isothermic_reduce,
    poly_ck_kernel,
    poly_ck_residual,
    recover_v,
)
from symten.geom import conformal_chart, euclidean_chart, field_from_callable


@pytest.mark.parametrize("n,m,expect", [(3, 1, 10), (3, 2, 35), (4, 1, 15), (3, 0, 1)])
def test_dimension_bound(n, m, expect):
    assert ck_dimension_bound(n, m) == expect


def test_dimension_bound_rejects_n2():
    with pytest.raises(ValueError):
        ck_dimension_bound(2, 1)


@pytest.mark.parametrize("n,m,degree,expect", [(3, 1, 3, 10), (4, 1, 3, 15), (3, 0, 3, 1), (3, 0, 0, 1)])
def test_flat_kernel_dimension(n, m, degree, expect):
    K = poly_ck_kernel(n, m, degree)
    assert K.dimension == expect
    for u in K.basis:
        assert poly_ck_residual(u) == (0, 0)


def test_kernel_degree_saturation():
    for m in (1, 2):
        assert poly_ck_kernel(3, m, 2 * m).dimension == poly_ck_kernel(3, m, 2 * m + 2).dimension


def test_kernel_rank2_attains_bound():
    assert poly_ck_kernel(3, 2, 6).dimension == ck_dimension_bound(3, 2)


def test_kernel_cap():
    with pytest.raises(ValueError):
        poly_ck_kernel(3, 2, 6, max_unknowns=10)


@pytest.mark.parametrize("m", [1, 2])
def test_hyperplane_constraint(m):
    assert constrained_ck_kernel(3, m, 2 * m + 2, "hyperplane").dimension == 0


def test_line_and_jet_constraints():
    assert constrained_ck_kernel(3, 2, 6, "line").dimension == 10
    assert constrained_ck_kernel(3, 1, 4, "jet", order=2).dimension == 0
    assert constrained_ck_kernel(3, 1, 4, "jet", order=1).dimension > 0
    with pytest.raises(ValueError):
        constrained_ck_kernel(3, 1, 3, "plane")
    with pytest.raises(ValueError):
        constrained_ck_kernel(3, 1, 3, "jet")


def test_kernel_elements_pass_ck_residual():
    chart = euclidean_chart(3)
    for u in poly_ck_kernel(3, 1, 2).basis:
        rep = ck_residual(u.to_tensor_field(chart), lattice=4)
        assert rep.accept and rep.pdu < 1e-10


def test_ck_residual_examples():
    flat2 = euclidean_chart(2)
    u = field_from_callable(flat2, 1, lambda x: x)
    rep = ck_residual(u)
    assert rep.accept and rep.du_minus_iv < 1e-13
    assert_allclose(rep.v.evaluate(flat2.lattice(3)), 1.0, atol=1e-14)
    const = field_from_callable(euclidean_chart(3), 1, lambda x: jnp.array([1.0, 0.0, 0.0]) + 0 * x[0])
    rep = ck_residual(const)
    assert rep.accept
    assert_allclose(rep.v.evaluate(np.zeros((1, 3))), 0.0, atol=1e-15)
    bad = field_from_callable(flat2, 2, lambda x: jnp.array([x[0] + 0.1 * x[1], 0.0, -x[0]]))
    assert not ck_residual(bad).accept
    # rank 0: the check is du = 0
    assert ck_residual(field_from_callable(flat2, 0, lambda x: jnp.array([3.0]) + 0 * x[0])).accept
    assert not ck_residual(field_from_callable(flat2, 0, lambda x: x[:1])).accept


def test_recover_v():
    flat3 = euclidean_chart(3)
    u = field_from_callable(flat3, 1, lambda x: x)
    assert_allclose(recover_v(u).evaluate(flat3.lattice(2)), 1.0, atol=1e-14)
    traced = field_from_callable(euclidean_chart(2), 2, lambda x: jnp.array([1.0, 0.0, 1.0]) + 0 * x[0])
    with pytest.raises(ValueError):
        recover_v(traced)


def test_recover_v_least_squares_oracle():
    chart = euclidean_chart(2)
    u = ckt_from_holomorphic(lambda z: z**2, 2, chart)
    X = chart.lattice(3)
    rep = ck_residual(u, points=X)
    # du = iv with v of rank 1: i v = sym(g (x) v) has components (v1, v2/3, v1/3, v2) on (111, 112, 122, 222)
    from symten.geom import d_op
    du = d_op(u).evaluate(X)
    v = recover_v(u).evaluate(X)
    for k in range(len(X)):
        A = np.array([[1, 0], [0, 1 / 3], [1 / 3, 0], [0, 1]])
        b = np.array([du[k, 0, 0, 0], du[k, 0, 0, 1], du[k, 0, 1, 1], du[k, 1, 1, 1]])
        assert_allclose(np.linalg.lstsq(A, b, rcond=None)[0], v[k], atol=1e-12)
    assert rep.accept


MU = {"zero": lambda x: 0.0 * x[0], "x": lambda x: x[0], "r2": lambda x: 0.5 * (x[0] ** 2 + x[1] ** 2)}


@pytest.mark.parametrize("mu", sorted(MU))
@pytest.mark.parametrize("m", [1, 2, 3])
def test_two_dimensional_equivalence(mu, m):
    chart = conformal_chart(MU[mu], lower=(-0.5, -0.5), upper=(0.5, 0.5))
    good = ckt_from_holomorphic(lambda z: z**2 + 1.0, m, chart)
    assert ck_residual(good, lattice=5).accept
    bad = ckt_from_holomorphic(lambda z: z**2 + 0.3 * jnp.conj(z), m, chart)
    assert not ck_residual(bad, lattice=5).accept


def test_isothermic_reduce_examples():
    chart = euclidean_chart(2)
    X = chart.lattice(3)
    u1 = field_from_callable(chart, 1, lambda x: jnp.array([x[0], 2.0 + x[1]]))
    a, b, err = isothermic_reduce(u1, X)
    assert_allclose(a, X[:, 0], atol=1e-14)
    assert_allclose(b, 2.0 + X[:, 1], atol=1e-14)
    assert err < 1e-10
    u2 = field_from_callable(chart, 2, lambda x: jnp.array([1.0, 0.0, -1.0]) + 0 * x[0])
    a, b, _ = isothermic_reduce(u2, X)
    assert_allclose(a, 1.0, atol=1e-14)
    assert_allclose(b, 0.0, atol=1e-14)
    z = field_from_callable(chart, 2, lambda x: jnp.zeros(3) + 0 * x[0])
    a, b, _ = isothermic_reduce(z, X)
    assert np.all(a == 0) and np.all(b == 0)
    traced = field_from_callable(chart, 2, lambda x: jnp.array([1.0, 0.0, 1.0]) + 0 * x[0])
    with pytest.raises(ValueError):
        isothermic_reduce(traced, X)


def test_isothermic_reduce_conformal():
    chart = conformal_chart(MU["x"], lower=(-0.5, -0.5), upper=(0.5, 0.5))
    u = ckt_from_holomorphic(lambda z: z**3, 2, chart)
    X = chart.lattice(4)
    a, b, err = isothermic_reduce(u, X)
    assert err < 1e-10
    w = (X[:, 0] + 1j * X[:, 1]) ** 3 * np.exp(2 * X[:, 0])
    assert_allclose(a + 1j * b, w, atol=1e-12)


def test_cr_residual_examples():
    flat = euclidean_chart(2)
    for k in (1, 2, 3):
        a = lambda x, k=k: jnp.real((x[0] + 1j * x[1]) ** k)
        b = lambda x, k=k: jnp.imag((x[0] + 1j * x[1]) ** k)
        assert cr_residual(a, b, 1, flat) < 1e-13
    chart = conformal_chart(MU["x"])
    assert cr_residual(lambda x: jnp.exp(x[0]), lambda x: 0 * x[0], 1, chart) < 1e-14
    X = np.array([[0.5, 0.0], [-0.25, 0.3]])
    r = cr_residual(lambda x: x[0] ** 2, lambda x: 0 * x[0], 1, flat, points=X)
    assert r == pytest.approx(1.0)


def test_geodesic_generator():
    th = 0.7
    assert_allclose(geodesic_generator_2d(lambda p: 0 * p[0], 0.2, 0.1, th), (np.cos(th), np.sin(th), 0.0),
                    atol=1e-15)
    c = geodesic_generator_2d(lambda p: p[0], 0.3, -0.2, th)
    assert c[2] == pytest.approx(-np.exp(-0.3) * np.sin(th))
