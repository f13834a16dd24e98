"""Fourier relations for the kinetic equation HU = F.

A function U on the unit sphere bundle is represented by its stack of
trace-free fields (u_0, ..., u_M); the stack of HU follows from
``transport_relations``.  In two dimensions H is available in closed form, so
the relations can be cross-checked against direct sampling of HU followed by
projection onto trace-free ranks.
"""

from __future__ import annotations

from dataclasses import dataclass

import jax
import jax.numpy as jnp
import numpy as np

from . import _dense
from .geom import Chart, TensorField, _g, delta_op, d_op, j_op, p_op, random_poly_field
from .metric_ops import MetricPoint
from .sphere import project_values


@dataclass(frozen=True, eq=False)
class KineticStack:
    """Trace-free fields ``parts[m]`` of rank m on one chart.

    Ranks above ``M`` are taken to be zero (truncated ladder).
    """

    chart: Chart
    parts: tuple[TensorField, ...]

    def __post_init__(self):
        for m, u in enumerate(self.parts):
            if u.rank != m or u.chart is not self.chart:
                raise ValueError(f"entry {m} must be a rank-{m} field on the stack's chart")

    @property
    def M(self) -> int:
        return len(self.parts) - 1

    def evaluate(self, X) -> list[np.ndarray]:
        return [u.evaluate(X) for u in self.parts]

    def max_trace(self, X) -> float:
        vals = [np.max(np.abs(j_op(u).evaluate(X))) for u in self.parts if u.rank >= 2]
        return float(max(vals, default=0.0))


def random_stack(chart: Chart, M: int, degree: int, rng: np.random.Generator) -> KineticStack:
    """Stack of p-projected random polynomial fields (trace-free for the chart metric)."""
    parts = []
    for m in range(M + 1):
        f = random_poly_field(chart, m, degree, rng)
        parts.append(p_op(f) if m >= 2 else f)
    return KineticStack(chart, tuple(parts))


def _zero_field(chart: Chart, m: int) -> TensorField:
    n = chart.dim
    return TensorField(chart, m, lambda x: jnp.zeros((n,) * m) + 0.0 * x[0])


def transport_relations(U: KineticStack, check_trace: bool = True, tol: float = 1e-9) -> KineticStack:
    """Stack F of HU: f_0 = delta u_1 / n, f_{m+1} = p d u_m + (m+2)/(n+2m+2) delta u_{m+2}."""
    chart = U.chart
    n, M = chart.dim, U.M
    if check_trace:
        X = chart.lattice(3)
        scale = max([float(np.max(np.abs(u.evaluate(X)))) for u in U.parts] + [1e-300])
        if U.max_trace(X) > tol * scale:
            raise ValueError("stack entries must be trace-free")
    parts = U.parts

    def u(k):
        return parts[k] if k <= M else None

    out = []
    f0 = delta_op(u(1)) * (1.0 / n) if u(1) is not None else _zero_field(chart, 0)
    out.append(f0)
    for m in range(M + 1):
        f = d_op(u(m))
        if m + 1 >= 2:
            f = p_op(f)
        if u(m + 2) is not None:
            f = f + delta_op(u(m + 2)) * ((m + 2) / (n + 2 * m + 2))
        out.append(f)
    return KineticStack(chart, tuple(out))


def _require_2d(chart: Chart):
    if chart.dim != 2 or chart.mu is None:
        raise ValueError("H is available in closed form only on 2D conformal charts")


def _sphere_function(U: KineticStack):
    """U(x, theta) = sum_m lambda u_m at the unit vector exp(-mu)(cos, sin)."""
    chart = U.chart
    mu = chart.mu

    def F(x, th):
        xi = jnp.exp(-mu(x)) * jnp.stack([jnp.cos(th), jnp.sin(th)])
        total = 0.0
        for m, u in enumerate(U.parts):
            val = u.fn(x)
            for k in range(m):
                val = _dense.contract_first(val, m - k, xi)
            total = total + val
        return total

    return F


def sample_HU(U: KineticStack, points) -> np.ndarray:
    """HU at (x, y, theta) rows, with H differentiated exactly by autodiff."""
    chart = U.chart
    _require_2d(chart)
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3:
        raise ValueError("points must have shape (P, 3) with columns x, y, theta")
    chart.check_point(P[:, :2])
    F = _sphere_function(U)
    mu = chart.mu

    def h(p):
        x, th = p[:2], p[2]
        gx = jax.grad(F, argnums=0)(x, th)
        gt = jax.grad(F, argnums=1)(x, th)
        gm = jax.grad(mu)(x)
        c, s = jnp.cos(th), jnp.sin(th)
        return jnp.exp(-mu(x)) * (c * gx[0] + s * gx[1] + (-gm[0] * s + gm[1] * c) * gt)

    return np.asarray(jax.vmap(h)(jnp.asarray(P)))


def theta_count(M: int) -> int:
    return 4 * (M + 2)


def fourier_of_HU(U: KineticStack, X, n_theta: int | None = None) -> list[np.ndarray]:
    """Project sampled HU onto trace-free ranks 0..M+1 at each node of X.

    Returns full component arrays, one per rank, each of shape (P,) + (2,)*m.
    """
    chart = U.chart
    _require_2d(chart)
    M = U.M
    N = theta_count(M) if n_theta is None else n_theta
    if N <= 2 * (M + 1):
        raise ValueError(f"{N} theta samples cannot resolve harmonics of order {M + 1}")
    X = chart.check_point(X)
    th = 2 * np.pi * np.arange(N) / N
    P = np.concatenate([np.repeat(X, N, axis=0), np.tile(th, X.shape[0])[:, None]], axis=1)
    HU = sample_HU(U, P).reshape(X.shape[0], N)
    mu = np.asarray(jax.vmap(chart.mu)(jnp.asarray(X)))
    G = np.asarray(jax.vmap(lambda x: _g(chart, x))(jnp.asarray(X)))
    out = [np.empty((X.shape[0],) + (2,) * m) for m in range(M + 2)]
    w = np.full(N, 2 * np.pi / N)
    for k in range(X.shape[0]):
        xi = np.exp(-mu[k]) * np.stack([np.cos(th), np.sin(th)], axis=-1)
        stack = project_values(HU[k], xi, w, MetricPoint(G[k]), M + 1)
        for m, t in enumerate(stack.parts):
            out[m][k] = t.full()
    return out


def consistency_residual(U: KineticStack, X) -> float:
    """Sup-norm gap between the transport relations and the sampled projection."""
    F = transport_relations(U, check_trace=False)
    direct = F.evaluate(X)
    sampled = fourier_of_HU(U, X)
    return float(max(np.max(np.abs(a - b)) for a, b in zip(direct, sampled)))


__all__ = [
    "KineticStack",
    "consistency_residual",
    "fourier_of_HU",
    "random_stack",
    "sample_HU",
    "theta_count",
    "transport_relations",
]
