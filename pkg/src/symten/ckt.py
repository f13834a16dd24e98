"""Conformal Killing tensors: residuals, recovery of v, flat kernels, 2D reduction.

A trace-free field u of rank m is conformal Killing when du = iv for some v,
equivalently p(du) = 0.  Flat-space kernels are computed exactly: the
unknowns are the rational coefficients of polynomial components, and the
equations p(du) = 0, ju = 0 are assembled monomial by monomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Callable

import jax
import jax.numpy as jnp
import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from . import _dense
from .geom import Chart, TensorField, _g, d_op, delta_op, i_op, j_op, p_op
from .poly import PolyTensorField

DEFAULT_MAX_UNKNOWNS = 20000


# --------------------------------------------------------------------------
# residual detection on general charts


@dataclass(frozen=True)
class CKReport:
    """Outcome of a conformal Killing test.

    Residuals are sup-norms over the sample points divided by ``scale``
    (the larger of sup|du| and sup|u| / chart size), so the verdict does not
    depend on the overall magnitude of u.
    """

    pdu: float
    ju: float
    du_minus_iv: float
    scale: float
    tol: float
    v: TensorField | None = field(default=None, repr=False)

    @property
    def accept(self) -> bool:
        return self.pdu <= self.tol and self.ju <= self.tol

    def as_dict(self) -> dict:
        return {"pdu": self.pdu, "ju": self.ju, "du_minus_iv": self.du_minus_iv,
                "scale": self.scale, "tol": self.tol, "accept": self.accept}


def _sup(vals) -> float:
    vals = np.asarray(vals)
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def recover_v(u: TensorField, check: bool = True, points=None, tol: float = 1e-9) -> TensorField:
    """v = m/(n+2m-2) delta u, the field with du = iv for a trace-free CKT u."""
    m, n = u.rank, u.dim
    if m < 1:
        raise ValueError("recover_v needs rank >= 1")
    if check and m >= 2:
        X = u.chart.lattice(5) if points is None else points
        ju = _sup(j_op(u).evaluate(X))
        if ju > tol * max(_sup(u.evaluate(X)), 1e-300):
            raise ValueError(f"input is not trace-free (|ju| = {ju:.3g})")
    c = m / (n + 2 * m - 2)
    return delta_op(u) * c


def ck_residual(u: TensorField, points=None, tol: float = 1e-9, lattice: int = 11) -> CKReport:
    """Sup-norm residuals of p(du) and ju, and of du - iv with the recovered v.

    For m = 0 the test is du = 0 and no v is returned.
    """
    chart = u.chart
    X = chart.lattice(lattice) if points is None else chart.check_point(points)
    m = u.rank
    du = d_op(u)
    du_vals = du.evaluate(X)
    u_vals = u.evaluate(X)
    scale = max(_sup(du_vals), _sup(u_vals) / chart.scale, 1e-300)
    if m == 0:
        r = _sup(du_vals) / scale
        return CKReport(r, 0.0, r, scale, tol, None)
    pdu = _sup(p_op(du).evaluate(X)) / scale
    ju = _sup(j_op(u).evaluate(X)) / max(_sup(u_vals), 1e-300) if m >= 2 else 0.0
    v = recover_v(u, check=False)
    rest = _sup(du_vals - i_op(v).evaluate(X)) / scale
    return CKReport(pdu, ju, rest, scale, tol, v)


# --------------------------------------------------------------------------
# exact flat-space kernels


def ck_dimension_bound(n: int, m: int) -> int:
    """Upper bound for the dimension of trace-free conformal Killing fields of rank m."""
    if n < 3:
        raise ValueError("the bound is stated for n >= 3")
    if m < 0:
        raise ValueError("m must be >= 0")
    num = (factorial(n + m - 3) * factorial(n + m - 2) * (n + 2 * m - 2) * (n + 2 * m - 1) * (n + 2 * m))
    den = factorial(m) * factorial(m + 1) * factorial(n - 2) * factorial(n)
    q, r = divmod(num, den)
    if r:
        raise ArithmeticError("bound is not an integer")
    return q


def _monomials(n: int, degree: int) -> list[tuple[int, ...]]:
    return [e for d in range(degree + 1) for e in _exps_of_degree(n, d)]


def _exps_of_degree(n: int, d: int):
    for c in itertools.combinations_with_replacement(range(n), d):
        e = [0] * n
        for a in c:
            e[a] += 1
        yield tuple(e)


def _exact_eye(n: int) -> np.ndarray:
    return np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)


def _slot_basis(n: int, m: int) -> np.ndarray:
    S = comb(n + m - 1, m)
    return _dense.from_slots(_exact_eye(S), m, n)  # (S,) + (n,)*m


def _pd_blocks(n: int, m: int) -> list[np.ndarray]:
    """For each axis a, the exact (S_{m+1}, S_m) matrix of E_I -> p sigma(e_a (x) E_I)."""
    I = _exact_eye(n)
    E = _slot_basis(n, m)
    out = []
    for a in range(n):
        t = _dense.sym_product(I[a], 1, E, m) if m else np.einsum("i,s->si", I[a], E.reshape(-1))
        t = _dense.project_p(t, m + 1, I, I)
        out.append(_dense.to_slots(t, m + 1, n).T)
    return out


def _trace_block(n: int, m: int) -> np.ndarray:
    I = _exact_eye(n)
    E = _slot_basis(n, m)
    t = _dense.trace(E, m, I)
    return _dense.to_slots(t, m - 2, n).T if m > 2 else t.reshape(E.shape[0], -1).T


CONSTRAINTS = ("hyperplane", "line", "jet")


@dataclass(frozen=True)
class CKKernel:
    """Exact kernel basis of the flat conformal Killing system."""

    n: int
    m: int
    degree: int
    constraint: str | None
    basis: tuple[PolyTensorField, ...]
    unknowns: int
    equations: int

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _free_columns(monos, S, constraint: str | None, order: int | None):
    keep = []
    for b, e in enumerate(monos):
        if constraint == "hyperplane" and e[-1] == 0:
            continue
        if constraint == "line" and all(x == 0 for x in e[1:]):
            continue
        if constraint == "jet" and sum(e) <= order:
            continue
        keep.extend(b * S + s for s in range(S))
    return keep


def _kernel(n: int, m: int, degree: int, constraint: str | None, order: int | None,
            max_unknowns: int) -> CKKernel:
    if n < 2 or m < 0 or degree < 0:
        raise ValueError("need n >= 2, m >= 0, degree >= 0")
    monos = _monomials(n, degree)
    where = {e: b for b, e in enumerate(monos)}
    S = comb(n + m - 1, m)
    cols = _free_columns(monos, S, constraint, order)
    if len(cols) > max_unknowns:
        raise ValueError(f"system too large: {len(cols)} unknowns > cap {max_unknowns}")
    col_of = {c: k for k, c in enumerate(cols)}
    S1 = comb(n + m, m + 1)
    blocks = _pd_blocks(n, m)
    tblock = _trace_block(n, m) if m >= 2 else None
    S2 = tblock.shape[0] if tblock is not None else 0
    rows: dict[int, dict[int, object]] = {}

    def put(r, c, val):
        if val:
            rows.setdefault(r, {})
            rows[r][c] = rows[r].get(c, QQ(0)) + QQ(val.numerator, val.denominator)

    n_pd = len(monos) * S1
    for b, e in enumerate(monos):
        for s in range(S):
            c = col_of.get(b * S + s)
            if c is None:
                continue
            for a in range(n):
                if e[a] == 0:
                    continue
                lower = list(e)
                lower[a] -= 1
                r0 = where[tuple(lower)] * S1
                for J in range(S1):
                    put(r0 + J, c, e[a] * blocks[a][J, s])
            if tblock is not None:
                for K in range(S2):
                    put(n_pd + b * S2 + K, c, tblock[K, s])
    n_rows = n_pd + len(monos) * S2
    used = sorted(rows)
    compact = {k: rows[r] for k, r in enumerate(used)}
    ncol = len(cols)
    if ncol == 0:
        basis_rows = []
    elif not compact:
        basis_rows = [[QQ(int(i == j)) for j in range(ncol)] for i in range(ncol)]
    else:
        A = DomainMatrix(compact, (len(used), ncol), QQ)
        basis_rows = A.to_sparse().nullspace().to_Matrix().tolist()
    basis = []
    for row in basis_rows:
        terms = {}
        for k, val in enumerate(row):
            if val == 0:
                continue
            b, s = divmod(cols[k], S)
            terms[(monos[b], _dense.sorted_indices(n, m)[s])] = Fraction(int(QQ.numer(val)), int(QQ.denom(val)))
        basis.append(PolyTensorField.from_terms(n, m, degree, terms, exact=True))
    return CKKernel(n, m, degree, constraint, tuple(basis), ncol, n_rows)


def poly_ck_kernel(n: int, m: int, degree: int, max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> CKKernel:
    """Trace-free conformal Killing fields on flat R^n with polynomial degree <= ``degree``."""
    return _kernel(n, m, degree, None, None, max_unknowns)


def constrained_ck_kernel(n: int, m: int, degree: int, constraint: str, order: int | None = None,
                          max_unknowns: int = DEFAULT_MAX_UNKNOWNS) -> CKKernel:
    """Kernel restricted by a vanishing condition.

    ``constraint`` is ``"hyperplane"`` (u = 0 on x_n = 0), ``"line"``
    (u = 0 on x_2 = ... = x_n = 0) or ``"jet"`` (all derivatives of order
    <= ``order`` vanish at the origin).
    """
    if constraint not in CONSTRAINTS:
        raise ValueError(f"unknown constraint {constraint!r}; expected one of {CONSTRAINTS}")
    if constraint == "jet" and (order is None or order < 0):
        raise ValueError("jet constraint needs order >= 0")
    if constraint == "line" and n < 2:
        raise ValueError("line constraint needs n >= 2")
    return _kernel(n, m, degree, constraint, order, max_unknowns)


def poly_ck_residual(u: PolyTensorField) -> tuple[object, object]:
    """(max |p du|, max |ju|) over coefficients; exactly zero for kernel elements."""
    pdu = u.d().p()
    ju = u.j() if u.rank >= 2 else None

    def mx(f):
        if f is None:
            return Fraction(0) if u.exact else 0.0
        vals = np.abs(f.coeffs).reshape(-1)
        return max(vals) if vals.size else 0

    return mx(pdu), mx(ju)


# --------------------------------------------------------------------------
# two dimensions: isothermal coordinates


def _require_2d(chart: Chart):
    if chart.dim != 2 or chart.mu is None:
        raise ValueError("need a two-dimensional chart with conformal factor mu")


def ckt_from_holomorphic(w: Callable, m: int, chart: Chart) -> TensorField:
    """Trace-free rank-m field whose sphere function is a cos m theta + b sin m theta.

    ``w`` maps a complex jax scalar z = x + iy to a complex value and
    a + ib = exp(m mu) w.  The field is conformal Killing iff w is holomorphic.
    """
    _require_2d(chart)
    if m < 1:
        raise ValueError("m must be >= 1")
    mu = chart.mu
    idx = _dense.sorted_indices(2, m)

    def comps(x):
        z = x[0] + 1j * x[1]
        ab = jnp.exp(2 * m * mu(x)) * w(z)  # alpha + i beta
        conj = jnp.conj(ab)
        return jnp.stack([jnp.real(conj * (1j) ** sum(I)) for I in idx])

    return TensorField(chart, m, lambda x: _dense.from_slots(comps(x), m, 2))


def _theta_samples(m: int) -> np.ndarray:
    N = 4 * (m + 1)
    return 2 * np.pi * np.arange(N) / N


def isothermic_reduce(u: TensorField, points=None, tol: float = 1e-9):
    """Coefficients (a, b) with lambda u = a cos m theta + b sin m theta at each point.

    Returns ``(a, b, reconstruction_error)`` on the given points (default an
    11 x 11 interior lattice).  Uses a DFT in theta with 4(m+1) samples.
    """
    chart = u.chart
    _require_2d(chart)
    m = u.rank
    X = chart.lattice(11) if points is None else chart.check_point(points)
    mu = np.asarray(jax.vmap(chart.mu)(jnp.asarray(X)))
    G = np.asarray(jax.vmap(lambda x: _g(chart, x))(jnp.asarray(X)))
    conf = np.exp(2 * mu)[:, None, None] * np.eye(2)
    if np.max(np.abs(G - conf)) > 1e-12 * max(1.0, np.max(np.abs(G))):
        raise ValueError("metric is not exp(2 mu) times the identity")
    U = u.evaluate(X)
    if m >= 2:
        ju = np.einsum("pii...->p...", U)
        if _sup(ju) > tol * max(_sup(U), 1e-300):
            raise ValueError("input is not trace-free")
    th = _theta_samples(m)
    xi = np.stack([np.cos(th), np.sin(th)], axis=-1)  # Euclidean unit vectors
    if m == 0:
        vals = np.repeat(U[:, None], th.size, axis=1)
    else:
        vals = np.einsum("p...i,ti->pt...", U, xi)
        for _ in range(m - 1):
            vals = np.einsum("pt...i,ti->pt...", vals, xi)
    lam = np.exp(-m * mu)[:, None] * vals  # (P, N)
    N = th.size
    if m == 0:
        a = lam.mean(axis=1)
        b = np.zeros_like(a)
    else:
        a = 2.0 / N * lam @ np.cos(m * th)
        b = 2.0 / N * lam @ np.sin(m * th)
    recon = a[:, None] * np.cos(m * th) + b[:, None] * np.sin(m * th)
    return a, b, _sup(recon - lam)


def cr_residual(a: Callable, b: Callable, m: int, chart: Chart, points=None) -> float:
    """Sup-norm of the two first-order equations satisfied by (a, b) for a CKT."""
    _require_2d(chart)
    mu = chart.mu
    X = chart.lattice(11) if points is None else chart.check_point(points)

    def res(x):
        ga = jax.grad(a)(x)
        gb = jax.grad(b)(x)
        gm = jax.grad(mu)(x)
        av, bv = a(x), b(x)
        e1 = ga[0] - gb[1] - m * (gm[0] * av - gm[1] * bv)
        e2 = ga[1] + gb[0] - m * (gm[1] * av + gm[0] * bv)
        return jnp.maximum(jnp.abs(e1), jnp.abs(e2))

    return _sup(jax.vmap(res)(jnp.asarray(X)))


def geodesic_generator_2d(mu: Callable, x, y, theta):
    """Coefficients (c_x, c_y, c_theta) of H for the metric exp(2 mu)(dx^2 + dy^2)."""
    p = jnp.asarray([x, y], dtype=jnp.float64)
    gm = jax.grad(mu)(p)
    e = jnp.exp(-mu(p))
    c, s = jnp.cos(theta), jnp.sin(theta)
    return (float(e * c), float(e * s), float(e * (-gm[0] * s + gm[1] * c)))


__all__ = [
    "CKKernel",
    "CKReport",
    "CONSTRAINTS",
    "ck_dimension_bound",
    "ck_residual",
    "ckt_from_holomorphic",
    "constrained_ck_kernel",
    "cr_residual",
    "geodesic_generator_2d",
    "isothermic_reduce",
    "poly_ck_kernel",
    "poly_ck_residual",
    "recover_v",
]
