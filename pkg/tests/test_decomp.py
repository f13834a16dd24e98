import numpy as np
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose

from symten.decomp import (
    GridField,
    assemble_bvp,
    central_d,
    central_delta,
    decompose_field,
    green_compatibility,
    l2_norm,
    manufactured_field,
    projection_matrix,
    refinement_study,
    smallest_eigenvalue,
)


def const_field(N, m, full):
    return GridField(m, np.broadcast_to(np.asarray(full, dtype=float), (N, N) + (2,) * m).copy())


def test_gridfield_validation():
    with pytest.raises(ValueError):
        GridField(1, np.zeros((5, 4, 2)))
    with pytest.raises(ValueError):
        GridField(1, np.zeros((2, 2, 2)))
    f = GridField.from_function(lambda X, Y: np.stack([X, Y], axis=-1), 1, 5)
    assert f.N == 5 and f.h == pytest.approx(0.25)
    assert_allclose(GridField.from_slots(f.slots(), 1).values, f.values)


def test_projection_matrix():
    P = projection_matrix(2)
    assert_allclose(P @ P, P, atol=1e-15)
    assert_allclose(P @ np.eye(2).reshape(-1), 0.0, atol=1e-15)
    assert_allclose(projection_matrix(1), np.eye(2))


def test_l2_norm():
    N = 5
    assert l2_norm(np.ones((N, N)), 0.25) == pytest.approx(np.sqrt(N * N) * 0.25)


def test_central_operators_exact_on_quadratics():
    N = 9
    X, Y = GridField.coords(N)
    v = X**2 + X * Y
    dv = central_d(v, 0)
    assert_allclose(dv[..., 0], 2 * X + Y, atol=1e-12)
    assert_allclose(dv[..., 1], X, atol=1e-12)
    w = np.stack([X**2, X * Y], axis=-1)
    assert_allclose(central_delta(w, 1), 3 * X, atol=1e-12)


def test_metric_field_decomposes_to_lambda():
    res = decompose_field(const_field(9, 2, np.eye(2)))
    assert np.max(np.abs(res.v.values)) == 0
    assert_allclose(res.lam.values, 1.0, atol=1e-14)
    assert np.max(np.abs(res.f_tilde.values)) < 1e-14
    assert res.ok


def test_constant_trace_free_is_f_tilde():
    target = np.array([[1.0, 0.0], [0.0, -1.0]])
    res = decompose_field(const_field(17, 2, target))
    assert_allclose(res.f_tilde.values, np.broadcast_to(target, res.f_tilde.values.shape), atol=1e-8)
    assert np.max(np.abs(res.v.values)) < 1e-8
    assert res.ok


def test_rank_one_gradient():
    # f = d(phi) with phi = 0 on the boundary: v recovers phi, f~ small
    N = 33
    X, Y = GridField.coords(N)
    phi = np.sin(np.pi * X) * np.sin(np.pi * Y)
    grad = np.stack([np.pi * np.cos(np.pi * X) * np.sin(np.pi * Y),
                     np.pi * np.sin(np.pi * X) * np.cos(np.pi * Y)], axis=-1)
    res = decompose_field(GridField(1, grad))
    assert l2_norm(res.v.values - phi, res.v.h) < 5e-3
    assert res.lam is None and res.ok


def test_boundary_values_zero():
    f, *_ = manufactured_field(17)
    res = decompose_field(f)
    assert np.all(res.v.values[0] == 0) and np.all(res.v.values[:, -1] == 0)
    assert res.divergence_residual <= res.tol_constraint
    assert res.trace_residual <= res.tol_constraint
    assert res.reconstruct_error <= res.tol_reconstruct


@pytest.mark.parametrize("m", [1, 2])
def test_operator_spd(m):
    f, *_ = manufactured_field(9, m)
    system = assemble_bvp(f)
    A = system.A_interior
    assert abs(A - A.T).max() < 1e-12
    assert smallest_eigenvalue(system) > 0


@pytest.mark.parametrize("m", [1, 2])
def test_green_compatibility(rng, m):
    assert green_compatibility(9, m, rng) < 1e-13


def test_m1_operator_is_five_point_laplacian():
    N = 7
    f, *_ = manufactured_field(N, 1)
    A = assemble_bvp(f).A_interior
    h = 1.0 / (N - 1)
    k = N - 2
    T = sp.diags([-np.ones(k - 1), 2 * np.ones(k), -np.ones(k - 1)], [-1, 0, 1])
    L = (sp.kron(T, sp.identity(k)) + sp.kron(sp.identity(k), T)) / h**2
    assert abs(A - L).max() < 1e-8 * abs(L).max()


def test_rank_checks():
    with pytest.raises(ValueError):
        decompose_field(const_field(5, 3, np.zeros((2, 2, 2))))


def test_refinement_orders():
    rep = refinement_study(2, (17, 33, 65))
    assert rep.bounded
    for name in ("v", "lam", "ft"):
        assert rep.orders[name] >= 1.8
