import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from symten.metric_ops import (
    MetricPoint,
    harmonic_decompose,
    i_xi,
    inner,
    j_xi,
    ji_apply,
    ji_commutation_rhs,
    ji_eigenvalue,
    ji_inverse,
    mul_metric,
    operator_matrix,
    orthonormal_basis,
    project_p,
    project_q,
    symbol_matrix,
    symbol_quadratic_form,
    trace,
)
from symten.symcore import SymTensor, dim_sym


def rel(a, b):
    return (a - b).max_abs() / max(a.max_abs(), b.max_abs(), 1e-300)


def brute_mul_metric(u_full, g):
    """sigma(g (x) u) by explicit permutation average."""
    t = np.multiply.outer(g, u_full)
    m = t.ndim
    perms = list(itertools.permutations(range(m)))
    return sum(np.transpose(t, p) for p in perms) / len(perms)


def test_metric_point_validates():
    with pytest.raises(ValueError):
        MetricPoint(np.array([[1.0, 0.0], [0.0, -1.0]]))
    with pytest.raises(ValueError):
        MetricPoint(np.array([[1.0, 2.0], [0.0, 1.0]]))
    g = MetricPoint.random(np.random.default_rng(0), 3)
    assert_allclose(g.g @ g.g_inv, np.eye(3), atol=1e-12)


def test_mul_metric_examples():
    g = MetricPoint.euclidean(2)
    assert_allclose(mul_metric(SymTensor.scalar(1.0, 2), g).full(), np.eye(2))
    e1 = SymTensor.basis(2, 1, 0)
    w = mul_metric(e1, g)
    assert w[(1, 1, 1)] == pytest.approx(1.0)
    assert w[(1, 2, 2)] == pytest.approx(1 / 3)


def test_mul_metric_matches_brute_force(rng):
    g = MetricPoint.random(rng, 3)
    u = SymTensor.random(rng, 3, 2)
    assert_allclose(mul_metric(u, g).full(), brute_mul_metric(g.g, u.full()), atol=1e-13)


def test_trace_examples():
    for n in (2, 3, 4):
        g = MetricPoint.euclidean(n)
        assert trace(g.as_tensor(), g).comps[0] == pytest.approx(n)
    g = MetricPoint.euclidean(3)
    e11 = SymTensor.from_full(np.diag([1.0, 0, 0]), 2)
    assert trace(e11, g).comps[0] == pytest.approx(1.0)
    assert trace(SymTensor.basis(3, 1, 0), g).max_abs() == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(0, 4), st.integers(0, 10**6))
def test_adjointness(n, m, seed):
    rng = np.random.default_rng(seed)
    g = MetricPoint.random(rng, n)
    u, v = SymTensor.random(rng, n, m), SymTensor.random(rng, n, m + 2)
    a, b = inner(mul_metric(u, g), v, g), inner(u, trace(v, g), g)
    assert a == pytest.approx(b, rel=1e-12, abs=1e-12)


def test_ji_scalar_case():
    g = MetricPoint.euclidean(3)
    c = SymTensor.scalar(2.5, 3)
    assert ji_apply(c, g, 1).comps[0] == pytest.approx(7.5)
    assert ji_commutation_rhs(c, g, 1).comps[0] == pytest.approx(7.5)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_ji_commutation_random(rng, k):
    for n in (2, 3, 4):
        g = MetricPoint.random(rng, n)
        for m in range(5):
            u = SymTensor.random(rng, n, m)
            assert rel(ji_apply(u, g, k), ji_commutation_rhs(u, g, k)) < 1e-12


def test_ji_commutation_exact():
    rng = np.random.default_rng(5)
    g = MetricPoint.euclidean(3, exact=True)
    for m in range(4):
        u = SymTensor.random(rng, 3, m, exact=True)
        assert (ji_apply(u, g, 2) - ji_commutation_rhs(u, g, 2)).max_abs() == 0


def test_ji_eigenvalue_values():
    # lambda_k = 2(k+1)(n+2m-2k)/((m+1)(m+2))
    assert ji_eigenvalue(2, 4, 0) == Fraction(2 * 10, 30)
    assert ji_eigenvalue(2, 4, 1) == Fraction(4 * 8, 30)
    assert ji_eigenvalue(3, 2, 1) == Fraction(4 * 5, 12)


def test_ji_eigenvalues_dense_matrix():
    # spectrum of ji on S^4 (n=2) from the assembled operator
    g = MetricPoint.euclidean(2)
    A = operator_matrix(lambda u: ji_apply(u, g, 1), 2, 4, 4, g)
    eig = np.sort(np.linalg.eigvalsh(0.5 * (A + A.T)))
    expect = sorted(float(ji_eigenvalue(2, 4, k)) for k in range(3) for _ in range(2 if k < 2 else 1))
    assert_allclose(eig, expect, rtol=1e-12)


def test_harmonic_decompose_examples(rng):
    g = MetricPoint.euclidean(3)
    parts = harmonic_decompose(g.as_tensor(), g).parts
    assert parts[0].max_abs() < 1e-15 and parts[1].comps[0] == pytest.approx(1.0)
    tf = project_p(SymTensor.random(rng, 3, 3), g)
    parts = harmonic_decompose(tf, g).parts
    assert rel(parts[0], tf) < 1e-13 and parts[1].max_abs() < 1e-13


@pytest.mark.parametrize("n,m", [(2, 4), (3, 5), (4, 6)])
def test_harmonic_decompose_random(rng, n, m):
    g = MetricPoint.random(rng, n)
    u = SymTensor.random(rng, n, m)
    hp = harmonic_decompose(u, g)
    assert rel(hp.reconstruct(g), u) < 1e-10
    embedded = [mul_metric(w, g, k) if k else w for k, w in enumerate(hp.parts)]
    for k, (w, x) in enumerate(zip(hp.parts, embedded)):
        if w.rank >= 2:
            assert trace(w, g).max_abs() < 1e-10 * u.max_abs()
        assert rel(ji_apply(x, g, 1), x * float(ji_eigenvalue(n, m, k))) < 1e-10
    for a, b in itertools.combinations(embedded, 2):
        assert abs(inner(a, b, g)) < 1e-10 * np.sqrt(inner(a, a, g) * inner(b, b, g) + 1e-300)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_summand_dimensions(n):
    # rank of the projector onto i^k Ker j equals alpha(m-2k) - alpha(m-2k-2)
    g = MetricPoint.euclidean(n)
    for m in range(7):
        B = np.eye(dim_sym(n, m))
        for k in range(m // 2 + 1):
            cols = []
            for row in B:
                hp = harmonic_decompose(SymTensor(n, m, row), g)
                w = hp.parts[k]
                cols.append((mul_metric(w, g, k) if k else w).comps)
            r = np.linalg.matrix_rank(np.array(cols), tol=1e-9)
            lower = dim_sym(n, m - 2 * k - 2) if m - 2 * k - 2 >= 0 else 0
            assert r == dim_sym(n, m - 2 * k) - lower


def test_projection_examples():
    g = MetricPoint.euclidean(2)
    u = SymTensor.from_full(np.diag([1.0, -1.0]), 2)
    assert rel(project_p(u, g), u) < 1e-15 and project_q(u, g).max_abs() < 1e-15
    G = g.as_tensor()
    assert project_p(G, g).max_abs() < 1e-15 and rel(project_q(G, g), G) < 1e-15


def test_rank2_projection_formula(rng):
    g = MetricPoint.random(rng, 3)
    u = SymTensor.random(rng, 3, 2)
    expect = u - g.as_tensor() * (trace(u, g).comps[0] / 3)
    assert rel(project_p(u, g), expect) < 1e-13


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 5), st.integers(0, 10**6))
def test_projector_algebra(n, m, seed):
    rng = np.random.default_rng(seed)
    g = MetricPoint.random(rng, n)
    u, v = SymTensor.random(rng, n, m), SymTensor.random(rng, n, m)
    p, q = project_p(u, g), project_q(u, g)
    tol = 1e-11 * max(u.max_abs(), 1.0)
    assert (project_p(p, g) - p).max_abs() < tol
    assert (project_q(q, g) - q).max_abs() < tol
    assert project_p(q, g).max_abs() < tol
    assert (p + q - u).max_abs() < tol
    if m >= 2:
        assert trace(p, g).max_abs() < tol
    assert inner(project_p(u, g), v, g) == pytest.approx(inner(u, project_p(v, g), g), rel=1e-10, abs=1e-10)


def test_ji_inverse(rng):
    g = MetricPoint.random(rng, 3)
    u = SymTensor.random(rng, 3, 4)
    assert rel(ji_apply(ji_inverse(u, g), g, 1), u) < 1e-12


def test_covector_operators(rng):
    n = 3
    g = MetricPoint.random(rng, n)
    xi = rng.standard_normal(n)
    assert i_xi(SymTensor.random(rng, n, 2), np.zeros(n)).max_abs() == 0
    for m in range(1, 5):
        u = SymTensor.random(rng, n, m)
        rhs = u * (g.norm2(xi) / (m + 1)) + i_xi(j_xi(u, xi, g), xi) * (m / (m + 1))
        assert rel(j_xi(i_xi(u, xi), xi, g), rhs) < 1e-12
        rhs = j_xi(u, xi, g) * (2 / (m + 1))
        if m >= 2:
            rhs = rhs + i_xi(trace(u, g), xi) * ((m - 1) / (m + 1))
        assert rel(trace(i_xi(u, xi), g), rhs) < 1e-12
        # p i_xi = i_xi p - 2/(m+1) i (ji)^{-1} j_xi p
        pu = project_p(u, g)
        rhs = i_xi(pu, xi) - mul_metric(ji_inverse(j_xi(pu, xi, g), g), g) * (2 / (m + 1))
        assert (project_p(i_xi(u, xi), g) - rhs).max_abs() < 1e-11 * i_xi(pu, xi).max_abs()
        v = SymTensor.random(rng, n, m + 1)
        assert inner(i_xi(u, xi), v, g) == pytest.approx(inner(u, j_xi(v, xi, g), g), rel=1e-12)


def test_symbol_scalar_case(rng):
    g = MetricPoint.random(rng, 3)
    xi = rng.standard_normal(3)
    S = symbol_matrix(xi, g, 0)
    assert_allclose(S, [[g.norm2(xi)]], rtol=1e-12)
    with pytest.raises(ValueError):
        symbol_matrix(np.zeros(3), g, 1)


def test_symbol_positive_definite():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(2, 4))
        m = int(rng.integers(0, 4))
        g = MetricPoint.random(rng, n)
        xi = rng.standard_normal(n)
        S = symbol_matrix(xi, g, m)
        assert_allclose(S, S.T, atol=1e-12)
        eig = np.linalg.eigvalsh(S)
        assert eig.min() > 0
        # lower bound |xi|^2/(m+1) from the closed quadratic form
        assert eig.min() >= (1 - 1e-10) * g.norm2(xi) / (m + 1)


def test_symbol_quadratic_form(rng):
    for n in (2, 3, 4):
        g = MetricPoint.random(rng, n)
        for m in range(4):
            B = orthonormal_basis(n, m, g, trace_free=True)
            f = SymTensor(n, m, rng.standard_normal(B.shape[0]) @ B)
            xi = rng.standard_normal(n)
            direct = inner(j_xi(project_p(i_xi(f, xi), g), xi, g), f, g)
            assert symbol_quadratic_form(f, xi, g) == pytest.approx(direct, rel=1e-10)
