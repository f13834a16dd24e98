"""Pointwise metric algebra: i, j, i_xi, j_xi, harmonic parts, p and q.

All maps act on :class:`~symten.symcore.SymTensor` values at a single point
with metric :class:`MetricPoint`.  ``(ji)^{-1}`` is never formed as a matrix;
it is applied by splitting into harmonic parts and dividing each part by its
eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from . import _dense
from .symcore import SymTensor, dim_sym


@dataclass(frozen=True, eq=False)
class MetricPoint:
    """Symmetric positive-definite matrix ``g`` together with its inverse."""

    g: np.ndarray
    g_inv: np.ndarray = field(default=None)

    def __post_init__(self):
        g = np.asarray(self.g)
        exact = g.dtype == object
        if not exact:
            g = g.astype(float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"metric must be a square matrix, got shape {g.shape}")
        gf = g.astype(float)
        if not np.allclose(gf, gf.T, rtol=0, atol=1e-12 * max(1.0, np.abs(gf).max())):
            raise ValueError("metric is not symmetric")
        if np.linalg.eigvalsh(gf).min() <= 0:
            raise ValueError("metric is not positive definite")
        if self.g_inv is None:
            if exact:
                inv = sympy.Matrix(g.tolist()).applyfunc(sympy.Rational).inv()
                g_inv = np.array(
                    [[Fraction(int(x.p), int(x.q)) for x in row] for row in inv.tolist()],
                    dtype=object,
                )
            else:
                g_inv = np.linalg.inv(g)
        else:
            g_inv = np.asarray(self.g_inv)
        err = np.abs((g @ g_inv).astype(float) - np.eye(g.shape[0])).max()
        if err > 1e-12 * max(1.0, np.linalg.cond(gf)):
            raise ValueError(f"g_inv is not the inverse of g (error {err:.3g})")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "g_inv", g_inv)

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    @property
    def exact(self) -> bool:
        return self.g.dtype == object

    @classmethod
    def euclidean(cls, n: int, exact: bool = False) -> "MetricPoint":
        if exact:
            e = np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
            return cls(e, e.copy())
        return cls(np.eye(n), np.eye(n))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, spread: float = 0.5) -> "MetricPoint":
        a = rng.standard_normal((n, n)) * spread
        return cls(np.eye(n) + a @ a.T)

    def as_tensor(self) -> SymTensor:
        return SymTensor.from_full(self.g, 2)

    def norm2(self, xi) -> float:
        """|xi|^2 for a covector xi."""
        xi = np.asarray(xi)
        return xi @ self.g_inv @ xi

    def raise_index(self, xi) -> np.ndarray:
        return self.g_inv @ np.asarray(xi)


@dataclass(frozen=True)
class HarmonicParts:
    """Trace-free parts ``parts[k]`` of rank m-2k with u = sum_k i^k parts[k]."""

    parts: tuple[SymTensor, ...]
    rank: int

    def reconstruct(self, g: MetricPoint) -> SymTensor:
        out = None
        for k, w in enumerate(self.parts):
            t = mul_metric(w, g, k)
            out = t if out is None else out + t
        return out


def _wrap(arr, m: int, n: int) -> SymTensor:
    return SymTensor.from_full(arr, m, n)


def _check_dim(u: SymTensor, g: MetricPoint):
    if u.dim != g.dim:
        raise ValueError(f"dim mismatch: tensor n={u.dim}, metric n={g.dim}")


def mul_metric(u: SymTensor, g: MetricPoint, times: int = 1) -> SymTensor:
    """The operator i: u -> sigma(g (x) u), applied ``times`` times."""
    _check_dim(u, g)
    return _wrap(_dense.mul_metric(u.full(), u.rank, g.g, times), u.rank + 2 * times, u.dim)


def trace(u: SymTensor, g: MetricPoint, times: int = 1) -> SymTensor:
    """The operator j (contraction with g^{-1}), applied ``times`` times.

    On rank 0 or 1 the trace is the zero map; a rank-0 zero is returned.
    """
    _check_dim(u, g)
    if u.rank < 2 * times:
        return SymTensor.zeros(u.dim, 0, exact=u.exact)
    return _wrap(_dense.trace(u.full(), u.rank, g.g_inv, times), u.rank - 2 * times, u.dim)


def ji_apply(u: SymTensor, g: MetricPoint, k: int) -> SymTensor:
    """j i^k u, composed directly."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return trace(mul_metric(u, g, k), g)


def ji_commutation_rhs(u: SymTensor, g: MetricPoint, k: int) -> SymTensor:
    """Closed form of j i^k u in terms of i^{k-1} u and i^k j u."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n, m = u.dim, u.rank
    den = (m + 2 * k - 1) * (m + 2 * k)
    c1 = Fraction(2 * k * (n + 2 * m + 2 * k - 2), den)
    out = mul_metric(u, g, k - 1) * _dense.cast(c1, u.comps)
    if m >= 2:
        c2 = Fraction(m * (m - 1), den)
        out = out + mul_metric(trace(u, g), g, k) * _dense.cast(c2, u.comps)
    return out


def harmonic_decompose(u: SymTensor, g: MetricPoint) -> HarmonicParts:
    """Split u into trace-free parts u_{m-2k} with u = sum_k i^k u_{m-2k}."""
    _check_dim(u, g)
    parts = _dense.harmonic_parts(u.full(), u.rank, g.g, g.g_inv)
    return HarmonicParts(
        tuple(_wrap(w, u.rank - 2 * k, u.dim) for k, w in enumerate(parts)), u.rank
    )


def ji_eigenvalue(n: int, m: int, k: int) -> Fraction:
    """Eigenvalue of ji on the summand i^k Ker j of rank-m tensors."""
    return _dense.ji_eigenvalue(n, m, k)


def ji_inverse(u: SymTensor, g: MetricPoint) -> SymTensor:
    _check_dim(u, g)
    return _wrap(_dense.ji_inverse(u.full(), u.rank, g.g, g.g_inv), u.rank, u.dim)


def project_p(u: SymTensor, g: MetricPoint) -> SymTensor:
    """Orthogonal projection onto Ker j (identity on ranks 0 and 1)."""
    _check_dim(u, g)
    return _wrap(_dense.project_p(u.full(), u.rank, g.g, g.g_inv), u.rank, u.dim)


def project_q(u: SymTensor, g: MetricPoint) -> SymTensor:
    """Complementary projection q = i (ji)^{-1} j onto the range of i."""
    return u - project_p(u, g)


def _covector(xi, n: int):
    xi = np.asarray(xi)
    if xi.shape != (n,):
        raise ValueError(f"covector must have shape ({n},), got {xi.shape}")
    return xi


def i_xi(u: SymTensor, xi) -> SymTensor:
    """Symmetric multiplication by the covector xi."""
    xi = _covector(xi, u.dim)
    return _wrap(_dense.sym_product(xi, 1, u.full(), u.rank), u.rank + 1, u.dim)


def j_xi(u: SymTensor, xi, g: MetricPoint) -> SymTensor:
    """Contraction of the first slot with the raised covector xi (adjoint of i_xi)."""
    xi = _covector(xi, u.dim)
    if u.rank == 0:
        raise ValueError("j_xi needs rank >= 1")
    return _wrap(_dense.contract_first(u.full(), u.rank, g.g_inv @ xi), u.rank - 1, u.dim)


def orthonormal_basis(n: int, m: int, g: MetricPoint, trace_free: bool = False) -> np.ndarray:
    """Orthonormal basis of S^m (or Ker j) under the metric inner product.

    Returns an array of shape (r, C(n+m-1, m)) of sorted-slot components.
    Built from the slot basis (projected by p when ``trace_free``), then
    orthonormalized through an eigen-decomposition of its Gram matrix so
    rank deficiency after projection is dropped cleanly.
    """
    S = dim_sym(n, m)
    eye = np.eye(S)
    full = _dense.from_slots(eye, m, n)
    if trace_free and m >= 2:
        full = _dense.project_p(full, m, g.g.astype(float), g.g_inv.astype(float))
    gram = _dense.inner(full[:, None], full[None, :], m, g.g_inv.astype(float))
    w, V = np.linalg.eigh(gram)
    keep = w > 1e-10 * w.max()
    coef = V[:, keep] / np.sqrt(w[keep])
    comps = _dense.to_slots(full, m, n)
    return coef.T @ comps


def operator_matrix(op, n: int, m_in: int, m_out: int, g: MetricPoint,
                    basis_in=None, basis_out=None) -> np.ndarray:
    """Matrix of a linear map between tensor spaces in orthonormal bases."""
    B_in = orthonormal_basis(n, m_in, g) if basis_in is None else basis_in
    B_out = orthonormal_basis(n, m_out, g) if basis_out is None else basis_out
    out = np.empty((B_out.shape[0], B_in.shape[0]))
    for b, c in enumerate(B_in):
        img = op(SymTensor(n, m_in, c))
        full = img.full()
        for a, e in enumerate(B_out):
            out[a, b] = _dense.inner(_dense.from_slots(e, m_out, n), full, m_out, g.g_inv)
    return out


def symbol_matrix(xi, g: MetricPoint, m: int) -> np.ndarray:
    """Matrix of f -> j_xi p i_xi f on trace-free rank-m tensors.

    The matrix is taken in an orthonormal basis of Ker j, so it is
    symmetric; it is positive definite for xi != 0.
    """
    n = g.dim
    xi = _covector(np.asarray(xi, dtype=float), n)
    if not np.any(xi):
        raise ValueError("xi must be nonzero")
    B = orthonormal_basis(n, m, g, trace_free=True)
    return operator_matrix(lambda f: j_xi(project_p(i_xi(f, xi), g), xi, g), n, m, m, g, B, B)


def symbol_quadratic_form(f: SymTensor, xi, g: MetricPoint) -> float:
    """Closed form of <j_xi p i_xi f, f> = |p i_xi f|^2 for trace-free f."""
    n, m = f.dim, f.rank
    ff = float(_dense.inner(f.full(), f.full(), m, g.g_inv))
    xi2 = float(g.norm2(xi))
    if m == 0:
        return xi2 * ff
    jf = j_xi(f, xi, g).full()
    jf2 = float(_dense.inner(jf, jf, m - 1, g.g_inv))
    return (xi2 * ff + m * (1 - 2 / (n + 2 * m - 2)) * jf2) / (m + 1)


def inner(u: SymTensor, v: SymTensor, g: MetricPoint):
    from .symcore import inner as _inner

    return _inner(u, v, g)


__all__ = [
    "HarmonicParts",
    "MetricPoint",
    "harmonic_decompose",
    "i_xi",
    "inner",
    "j_xi",
    "ji_apply",
    "ji_commutation_rhs",
    "ji_eigenvalue",
    "ji_inverse",
    "mul_metric",
    "operator_matrix",
    "orthonormal_basis",
    "project_p",
    "project_q",
    "symbol_matrix",
    "symbol_quadratic_form",
    "trace",
]
