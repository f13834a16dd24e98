"""Tensors as polynomials on the fibre sphere.

``kappa`` turns a rank-m tensor into the homogeneous polynomial
u_{i...} xi^i ...; ``lam`` is its restriction to |xi|_g = 1.  This module also
provides sphere quadrature (n = 2, 3) and projection of sphere functions onto
stacks of trace-free tensors.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from math import factorial, gamma, pi
from typing import Callable

import numpy as np

from . import _dense
from .metric_ops import MetricPoint, harmonic_decompose, orthonormal_basis
from .symcore import SymTensor


def _points(xi, n: int) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != n:
        raise ValueError(f"points must have last dimension {n}, got {xi.shape}")
    return xi


def kappa_full(u_full, m: int, xi):
    """Evaluate u_{i_1..i_m} xi^{i_1}..xi^{i_m} on full arrays.

    Leading batch axes of ``u_full`` and ``xi`` broadcast against each other.
    """
    out = u_full
    for k in range(m):
        out = _dense.contract_first(out, m - k, xi)
    return out


def kappa_eval(u: SymTensor, xi) -> np.ndarray:
    """Value of the homogeneous polynomial of u at vector(s) xi."""
    xi = _points(xi, u.dim)
    if u.rank == 0:
        return np.broadcast_to(u.comps[0], xi.shape[:-1]).astype(u.comps.dtype)
    return kappa_full(u.full(), u.rank, xi)


def lam_eval(u: SymTensor, xi, g: MetricPoint) -> np.ndarray:
    """Restriction of kappa(u) to the g-unit sphere; rejects off-sphere points."""
    xi = _points(xi, u.dim)
    norm = np.einsum("...i,ij,...j->...", xi, g.g.astype(float), xi)
    if np.max(np.abs(norm - 1.0)) > 1e-11:
        raise ValueError("points are not on the unit sphere of g")
    return kappa_eval(u, xi)


def poly_coefficients(u: SymTensor) -> dict[tuple[int, ...], object]:
    """Monomial coefficients of kappa(u): {alpha: multinomial(alpha) u_alpha}."""
    coeffs = {}
    for mi, c in u.items():
        alpha = [0] * u.dim
        for e in mi.entries:
            alpha[e - 1] += 1
        coeffs[tuple(alpha)] = mi.multiplicity * c
    return coeffs


def _poly_eval(coeffs: dict, xi: np.ndarray) -> np.ndarray:
    out = np.zeros(xi.shape[:-1])
    for alpha, c in coeffs.items():
        out = out + float(c) * np.prod(xi ** np.asarray(alpha), axis=-1)
    return out


def _poly_d2(coeffs: dict, i: int, j: int) -> dict:
    out: dict = {}
    for alpha, c in coeffs.items():
        a = list(alpha)
        f = a[i]
        a[i] -= 1
        if f == 0:
            continue
        f2 = a[j]
        a[j] -= 1
        if f2 == 0:
            continue
        key = tuple(a)
        out[key] = out.get(key, 0) + c * f * f2
    return out


def vertical_laplacian(u: SymTensor, g: MetricPoint, xi) -> np.ndarray:
    """g^{ij} d^2/dxi^i dxi^j of kappa(u), by differentiating monomials."""
    xi = _points(xi, u.dim)
    coeffs = poly_coefficients(u)
    ginv = g.g_inv.astype(float)
    out = np.zeros(xi.shape[:-1])
    for i in range(u.dim):
        for j in range(u.dim):
            if ginv[i, j] != 0:
                out = out + ginv[i, j] * _poly_eval(_poly_d2(coeffs, i, j), xi)
    return out


def vertical_laplacian_check(u: SymTensor, g: MetricPoint, xi=None, seed: int = 0) -> float:
    """max |Lap_v kappa(u) - m(m-1) kappa(ju)| over sample vectors."""
    from .metric_ops import trace

    m = u.rank
    if xi is None:
        xi = np.random.default_rng(seed).standard_normal((32, u.dim))
    lhs = vertical_laplacian(u, g, xi)
    if m < 2:
        return float(np.max(np.abs(lhs)))
    rhs = m * (m - 1) * kappa_eval(trace(u, g), xi).astype(float)
    return float(np.max(np.abs(lhs - rhs)))


def sphere_rule(n: int, order: int, g: MetricPoint | None = None):
    """Nodes (vectors of g-length 1) and weights for the fibre sphere.

    Exact for polynomials in xi of degree <= ``order``.  For a general metric
    g = L L^T the Euclidean rule is mapped through xi = L^{-T} eta, an isometry
    onto the g-unit sphere.
    """
    if order < 0:
        raise ValueError("order must be >= 0")
    if n == 2:
        N = order + 1
        th = 2 * pi * np.arange(N) / N
        eta = np.stack([np.cos(th), np.sin(th)], axis=-1)
        w = np.full(N, 2 * pi / N)
    elif n == 3:
        q = order // 2 + 1
        z, wz = np.polynomial.legendre.leggauss(q)
        N = order + 1
        ph = 2 * pi * np.arange(N) / N
        Z, PH = np.meshgrid(z, ph, indexing="ij")
        r = np.sqrt(1 - Z**2)
        eta = np.stack([r * np.cos(PH), r * np.sin(PH), Z], axis=-1).reshape(-1, 3)
        w = (wz[:, None] * np.full(N, 2 * pi / N)[None, :]).reshape(-1)
    else:
        raise ValueError(f"sphere quadrature supports n in (2, 3), got {n}")
    if g is not None:
        L = np.linalg.cholesky(g.g.astype(float))
        eta = np.linalg.solve(L.T, eta.T).T
    return eta, w


def sphere_quadrature(n: int, f: Callable[[np.ndarray], np.ndarray], order: int,
                      g: MetricPoint | None = None) -> float:
    """Integral of f over the (g-)unit sphere; f maps (P, n) points to (P,)."""
    xi, w = sphere_rule(n, order, g)
    return float(np.sum(w * np.asarray(f(xi), dtype=float)))


def norm_constant(n: int, m: int) -> float:
    """<lam u, lam v>_sphere / <u, v> for trace-free u, v of rank m."""
    if n < 2 or m < 0:
        raise ValueError("need n >= 2 and m >= 0")
    return factorial(m) * pi ** (n / 2) / (2 ** (m - 1) * gamma(n / 2 + m))


_BASIS_CACHE: dict = {}
_BASIS_LOCK = threading.Lock()


def trace_free_basis(n: int, m: int, g: MetricPoint) -> np.ndarray:
    """Cached orthonormal basis of Ker j (rows are sorted-slot components)."""
    key = (n, m, np.asarray(g.g, dtype=float).tobytes())
    B = _BASIS_CACHE.get(key)
    if B is None:
        with _BASIS_LOCK:
            B = _BASIS_CACHE.get(key)
            if B is None:
                B = orthonormal_basis(n, m, g, trace_free=True)
                B.flags.writeable = False
                _BASIS_CACHE[key] = B
    return B


@dataclass(frozen=True)
class HarmonicStack:
    """Trace-free tensors u_0, ..., u_M (u_m of rank m)."""

    parts: tuple[SymTensor, ...]

    def __post_init__(self):
        for m, u in enumerate(self.parts):
            if u.rank != m:
                raise ValueError(f"entry {m} has rank {u.rank}")

    @property
    def M(self) -> int:
        return len(self.parts) - 1

    def evaluate(self, xi) -> np.ndarray:
        return sum(kappa_eval(u, xi).astype(float) for u in self.parts)

    def max_trace(self, g: MetricPoint) -> float:
        from .metric_ops import trace

        return max([trace(u, g).max_abs() for u in self.parts if u.rank >= 2], default=0.0)


def project_values(values: np.ndarray, xi: np.ndarray, w: np.ndarray, g: MetricPoint,
                   M: int) -> HarmonicStack:
    """Fourier stack from samples ``values`` of a function at nodes ``xi``."""
    n = g.dim
    parts = []
    for m in range(M + 1):
        B = trace_free_basis(n, m, g)
        if m == 0:
            vals = B[:, :1] * np.ones((1, xi.shape[0]))
        else:
            vals = kappa_full(_dense.from_slots(B, m, n)[:, None], m, xi[None, :])
        coef = (vals * w[None, :]) @ values / norm_constant(n, m)
        parts.append(SymTensor(n, m, coef @ B))
    return HarmonicStack(tuple(parts))


def fourier_project(phi: Callable[[np.ndarray], np.ndarray], g: MetricPoint, M: int,
                    order: int | None = None) -> HarmonicStack:
    """Project a function on the g-unit sphere onto trace-free ranks 0..M.

    ``order`` is the exactness degree of the quadrature; it must be at least
    2M so that products of degree-M harmonics are integrated exactly.
    """
    if M < 0:
        raise ValueError("M must be >= 0")
    order = 2 * M + 2 if order is None else order
    if order < 2 * M:
        raise ValueError(f"quadrature order {order} is insufficient for M={M} (need >= {2 * M})")
    xi, w = sphere_rule(g.dim, order, g)
    return project_values(np.asarray(phi(xi), dtype=float), xi, w, g, M)


def stack_from_tensor(u: SymTensor, g: MetricPoint) -> HarmonicStack:
    """Stack whose sphere function equals lam(u): the harmonic parts of u by rank."""
    parts = harmonic_decompose(u, g).parts
    M = u.rank
    out = [SymTensor.zeros(u.dim, r) for r in range(M + 1)]
    for w in parts:
        out[w.rank] = w
    return HarmonicStack(tuple(out))


__all__ = [
    "HarmonicStack",
    "fourier_project",
    "kappa_eval",
    "lam_eval",
    "norm_constant",
    "poly_coefficients",
    "project_values",
    "sphere_quadrature",
    "sphere_rule",
    "stack_from_tensor",
    "trace_free_basis",
    "vertical_laplacian",
    "vertical_laplacian_check",
]
