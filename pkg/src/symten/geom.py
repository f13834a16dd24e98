"""Charts, covariant derivatives and the operators d, delta, Laplace.

Metrics and tensor fields are jax-traceable callables of a single point
``x`` of shape (n,); derivatives come from forward-mode autodiff in float64.
A chart may instead supply a plain numpy metric and a finite-difference step,
in which case metric derivatives use central differences with Richardson
extrapolation (fields on such charts are not supported).

Index conventions
-----------------
``christoffel(chart, x)[p, j, k]`` is Gamma^p_{jk}.  ``nabla`` puts the
derivative index first: ``(nabla u)[j, i_1, ..., i_m]``.  The curvature tensor
returned by :func:`curvature` is the one for which

    (nabla_j nabla_k - nabla_k nabla_j) u_i = R^p_{i k j} u_p,

with ``nabla_j nabla_k u`` meaning nabla_j applied to nabla u (the outer
derivative index first), and ``R_{ijkl} = g_{ip} R^p_{jkl}``.  The Ricci tensor
is ``R_{ij} = g^{kl} R_{kijl}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import jax

jax.config.update("jax_enable_x64", True)

import jax.numpy as jnp  # noqa: E402
import numpy as np  # noqa: E402

from . import _dense  # noqa: E402
from .metric_ops import MetricPoint  # noqa: E402
from .symcore import SymTensor  # noqa: E402


# Jitted pointwise kernels.  Wrapping them keeps nested autodiff traces small:
# jax caches the inner jaxpr instead of re-tracing the Python body each time.
_symmetrize = jax.jit(_dense.symmetrize, static_argnums=1)
_mul_metric = jax.jit(_dense.mul_metric, static_argnums=(1, 3))
_trace = jax.jit(_dense.trace, static_argnums=(1, 3))
_project_p = jax.jit(_dense.project_p, static_argnums=1)
_project_q = jax.jit(_dense.project_q, static_argnums=1)
_ji_inverse = jax.jit(_dense.ji_inverse, static_argnums=1)
_inv = jax.jit(jnp.linalg.inv)


# --------------------------------------------------------------------------
# charts


@dataclass(frozen=True, eq=False)
class Chart:
    """Axis-aligned coordinate box with a smooth metric.

    Parameters
    ----------
    lower, upper : sequence of float
        Corners of the box.
    metric_fn : callable
        ``x -> (n, n)`` metric matrix.  Must be jax-traceable unless
        ``fd_step`` is given.
    fd_step : float, optional
        Use finite differences (step ``fd_step * scale``) for metric
        derivatives instead of autodiff.
    mu : callable, optional
        Conformal factor for 2D charts with g = exp(2 mu) I.
    """

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    metric_fn: Callable
    name: str = "custom"
    fd_step: float | None = None
    mu: Callable | None = None

    def __post_init__(self):
        lo = tuple(float(a) for a in self.lower)
        hi = tuple(float(b) for b in self.upper)
        if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"bad box {lo} x {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def scale(self) -> float:
        return max(b - a for a, b in zip(self.lower, self.upper))

    @property
    def analytic(self) -> bool:
        return self.fd_step is None

    def check_point(self, x, slack: float = 1e-12):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise ValueError(f"point dimension {x.shape[-1]} != chart dimension {self.dim}")
        lo = np.asarray(self.lower) - slack * self.scale
        hi = np.asarray(self.upper) + slack * self.scale
        if np.any(x < lo) or np.any(x > hi):
            raise ValueError("point outside chart domain")
        return x

    def metric(self, x) -> MetricPoint:
        x = self.check_point(x)
        return MetricPoint(np.asarray(self.metric_fn(x), dtype=float))

    def lattice(self, k: int = 11, interior: bool = True) -> np.ndarray:
        """k^n lattice of points (strictly inside the box when ``interior``)."""
        axes = []
        for a, b in zip(self.lower, self.upper):
            if interior:
                t = (np.arange(k) + 0.5) / k
            else:
                t = np.linspace(0.0, 1.0, k)
            axes.append(a + (b - a) * t)
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, self.dim)

    def sample_points(self, count: int, rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
        lo = np.asarray(self.lower)
        hi = np.asarray(self.upper)
        w = hi - lo
        return lo + w * (margin + (1 - 2 * margin) * rng.random((count, self.dim)))


def euclidean_chart(n: int, lower=None, upper=None) -> Chart:
    lower = (-1.0,) * n if lower is None else lower
    upper = (1.0,) * n if upper is None else upper
    return Chart(lower, upper, lambda x: jnp.eye(n, dtype=jnp.float64) + 0.0 * x[0],
                 name="euclidean", mu=(lambda x: 0.0 * x[0]) if n == 2 else None)


def conformal_chart(mu: Callable, n: int = 2, lower=None, upper=None, name: str = "conformal") -> Chart:
    """Metric exp(2 mu(x)) times the identity."""
    lower = (-1.0,) * n if lower is None else lower
    upper = (1.0,) * n if upper is None else upper
    return Chart(lower, upper, lambda x: jnp.exp(2 * mu(x)) * jnp.eye(n), name=name, mu=mu)


CONFORMAL_FACTORS: dict[str, Callable] = {
    "zero": lambda x: 0.0 * x[0],
    "x": lambda x: x[0],
    "r2": lambda x: 0.5 * (x[0] ** 2 + x[1] ** 2),
}


def named_chart(spec: str, n: int = 2) -> Chart:
    """``euclidean`` or ``conformal:<id>`` with id in :data:`CONFORMAL_FACTORS`."""
    if spec == "euclidean":
        return euclidean_chart(n)
    if spec.startswith("conformal:"):
        key = spec.split(":", 1)[1]
        if key not in CONFORMAL_FACTORS:
            raise ValueError(f"unknown conformal factor {key!r}; known: {sorted(CONFORMAL_FACTORS)}")
        if n != 2:
            raise ValueError("named conformal factors are two-dimensional")
        return conformal_chart(CONFORMAL_FACTORS[key], 2, name=spec)
    raise ValueError(f"unknown metric selector {spec!r}")


def polar_chart(lower=(0.5, 0.0), upper=(2.0, 3.0)) -> Chart:
    """diag(1, x^2) on x > 0."""
    return Chart(lower, upper, lambda x: jnp.diag(jnp.array([1.0 + 0.0 * x[0], x[0] ** 2])), name="polar")


def sphere_patch_chart(lower=(0.4, 0.0), upper=(2.6, 3.0)) -> Chart:
    """Round unit sphere, diag(1, sin^2 x), away from the poles."""
    return Chart(lower, upper, lambda x: jnp.diag(jnp.array([1.0 + 0.0 * x[0], jnp.sin(x[0]) ** 2])),
                 name="sphere")


# --------------------------------------------------------------------------
# metric derivatives


def _g(chart: Chart, x):
    return jnp.asarray(chart.metric_fn(x), dtype=jnp.float64)


def _fd_first(f, x, h):
    """Central difference with one Richardson step (O(h^4))."""
    x = np.asarray(x, dtype=float)
    out = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = 1.0
        d1 = (np.asarray(f(x + h * e)) - np.asarray(f(x - h * e))) / (2 * h)
        d2 = (np.asarray(f(x + 2 * h * e)) - np.asarray(f(x - 2 * h * e))) / (4 * h)
        out.append((4 * d1 - d2) / 3)
    return np.stack(out, axis=-1)


def metric_derivative(chart: Chart, x):
    """dg[i, j, k] = d g_ij / d x^k."""
    if chart.analytic:
        return jax.jacfwd(lambda y: _g(chart, y))(jnp.asarray(x, dtype=jnp.float64))
    h = chart.fd_step * chart.scale
    return jnp.asarray(_fd_first(lambda y: np.asarray(chart.metric_fn(y), dtype=float), x, h))


def _christoffel(chart: Chart, x):
    g = _g(chart, x)
    ginv = jnp.linalg.inv(g)
    dg = metric_derivative(chart, x)
    # Gamma_{l j k} = 1/2 (d_j g_lk + d_k g_lj - d_l g_jk)
    low = 0.5 * (jnp.einsum("lkj->ljk", dg) + jnp.einsum("ljk->ljk", dg) - jnp.einsum("jkl->ljk", dg))
    return jnp.einsum("pl,ljk->pjk", ginv, low)


def christoffel(chart: Chart, x) -> np.ndarray:
    """Levi-Civita symbols ``G[p, j, k] = Gamma^p_{jk}`` at a point."""
    x = chart.check_point(x)
    return np.asarray(_christoffel(chart, jnp.asarray(x)))


def _riemann_up(chart: Chart, x):
    """Standard R^r_{s a b} = d_a G^r_{bs} - d_b G^r_{as} + G^r_{al} G^l_{bs} - G^r_{bl} G^l_{as}."""
    G = _christoffel(chart, x)
    if chart.analytic:
        dG = jax.jacfwd(lambda y: _christoffel(chart, y))(x)  # [r, b, s, a] = d_a G^r_{bs}
    else:
        h = chart.fd_step * chart.scale
        dG = jnp.asarray(_fd_first(lambda y: np.asarray(_christoffel(chart, jnp.asarray(y))), np.asarray(x), h))
    t1 = jnp.einsum("rbsa->rsab", dG)
    t2 = jnp.einsum("rasb->rsab", dG)
    t3 = jnp.einsum("ral,lbs->rsab", G, G)
    t4 = jnp.einsum("rbl,las->rsab", G, G)
    return t1 - t2 + t3 - t4


def _curvature(chart: Chart, x):
    std = _riemann_up(chart, x)
    g = _g(chart, x)
    ginv = jnp.linalg.inv(g)
    # For covectors the standard tensor gives [nabla_j, nabla_k] u_i = -R^p_{ijk} u_p
    # = R^p_{ikj} u_p, which is the convention documented above.
    R_low = jnp.einsum("ip,pjkl->ijkl", g, std)
    ricci = jnp.einsum("kl,kijl->ij", ginv, R_low)
    return R_low, ricci


def curvature(chart: Chart, x) -> tuple[np.ndarray, np.ndarray]:
    """(R_{ijkl}, R_{ij}) at a point, conventions as in the module docstring."""
    x = chart.check_point(x)
    R, ric = _curvature(chart, jnp.asarray(x))
    return np.asarray(R), np.asarray(ric)


def curvature_action_full(u, m: int, R_low, ricci, ginv):
    """(Ru) on full arrays; see :func:`curvature_action`."""
    xp = _dense.xp_of(u, R_low)
    if m == 0:
        return 0.0 * u
    ric_up = xp.einsum("ji,ia->ja", ginv, ricci)  # g^{ji} R_{i a}
    n = ginv.shape[-1]
    t1 = xp.einsum("ja,jr->ar", ric_up, u.reshape((n, -1))).reshape((n,) * m)
    out = m * _dense.symmetrize(t1, m)
    if m >= 2:
        Rm = xp.einsum("ip,jq,iajb->paqb", ginv, ginv, R_low)  # R^p_a^q_b
        t2 = xp.einsum("paqb,pqr->abr", Rm, u.reshape((n, n, -1))).reshape((n,) * m)
        out = out + m * (m - 1) * _dense.symmetrize(t2, m)
    return out


def curvature_action(u: SymTensor, R_low, ricci, g: MetricPoint) -> SymTensor:
    """The zero-order operator R built from Ricci and full curvature.

    (Ru)_{i_1..i_m} = sum_a g^{ij} R_{i i_a} u_{j ...}
                      + 2 sum_{a<b} g^{ip} g^{jq} R_{i i_a j i_b} u_{p q ...}
    """
    if u.rank < 1:
        raise ValueError("curvature action needs rank >= 1")
    full = curvature_action_full(u.full(), u.rank, np.asarray(R_low), np.asarray(ricci), g.g_inv)
    return SymTensor.from_full(full, u.rank, u.dim)


# --------------------------------------------------------------------------
# fields


@dataclass(frozen=True, eq=False)
class TensorField:
    """Tensor field of rank ``rank`` given by a jax-traceable ``fn(x)``.

    ``fn`` returns the full (n,)*rank component array at a single point.
    ``symmetric`` is False for intermediate raw tensors such as nabla u.
    """

    chart: Chart
    rank: int
    fn: Callable
    symmetric: bool = True

    @property
    def dim(self) -> int:
        return self.chart.dim

    def __call__(self, x):
        return self.fn(x)

    def evaluate(self, X) -> np.ndarray:
        """Values at points X of shape (P, n); result (P,) + (n,)*rank."""
        X = self.chart.check_point(X)
        return np.asarray(jax.vmap(self.fn)(jnp.asarray(X)))

    def at(self, x) -> SymTensor:
        x = self.chart.check_point(x)
        return SymTensor.from_full(np.asarray(self.fn(jnp.asarray(x))), self.rank, self.dim)

    def _same(self, other: "TensorField"):
        if other.rank != self.rank or other.chart is not self.chart:
            raise ValueError("fields must share chart and rank")

    def __add__(self, other: "TensorField") -> "TensorField":
        self._same(other)
        f, h = self.fn, other.fn
        return TensorField(self.chart, self.rank, lambda x: f(x) + h(x), self.symmetric and other.symmetric)

    def __sub__(self, other: "TensorField") -> "TensorField":
        self._same(other)
        f, h = self.fn, other.fn
        return TensorField(self.chart, self.rank, lambda x: f(x) - h(x), self.symmetric and other.symmetric)

    def __mul__(self, c: float) -> "TensorField":
        f = self.fn
        return TensorField(self.chart, self.rank, lambda x: c * f(x), self.symmetric)

    __rmul__ = __mul__


def _require_analytic(chart: Chart):
    if not chart.analytic:
        raise ValueError("field operators need an autodiff chart (fd_step is None)")


def _nabla_fn(fn: Callable, m: int, chart: Chart) -> Callable:
    _require_analytic(chart)

    def nab(x):
        # the primal comes back as aux, so fn is traced once per nesting level
        du, u = jax.jacfwd(lambda y: (lambda v: (v, v))(fn(y)), has_aux=True)(x)  # derivative index last
        du = jnp.moveaxis(du, -1, 0)
        if m == 0:
            return du
        G = _christoffel(chart, x)
        for a in range(m):
            ua = jnp.moveaxis(u, a, 0)
            corr = jnp.einsum("pji,p...->ji...", G, ua)
            du = du - jnp.moveaxis(corr, 1, 1 + a)
        return du

    return nab


def nabla(field: TensorField, x=None):
    """Covariant derivative (derivative index first).

    With ``x`` given, returns the rank m+1 array at that point; otherwise a
    raw :class:`TensorField`.
    """
    out = TensorField(field.chart, field.rank + 1, _nabla_fn(field.fn, field.rank, field.chart), False)
    if x is None:
        return out
    x = field.chart.check_point(x)
    return np.asarray(out.fn(jnp.asarray(x)))


def d_op(field: TensorField) -> TensorField:
    """Inner derivative d = sigma nabla."""
    nab = _nabla_fn(field.fn, field.rank, field.chart)
    m = field.rank + 1
    return TensorField(field.chart, m, lambda x: _symmetrize(nab(x), m))


def _ginv(chart: Chart, x):
    return _inv(_g(chart, x))


def delta_op(field: TensorField) -> TensorField:
    """Divergence g^{jk} nabla_j u_{k ...}."""
    if field.rank < 1:
        raise ValueError("divergence needs rank >= 1")
    nab = _nabla_fn(field.fn, field.rank, field.chart)
    chart = field.chart
    return TensorField(chart, field.rank - 1,
                       lambda x: _trace(nab(x), field.rank + 1, _ginv(chart, x), 1))


def laplace_op(field: TensorField) -> TensorField:
    """Rough Laplacian g^{jk} nabla_j nabla_k u."""
    chart = field.chart
    nab = _nabla_fn(field.fn, field.rank, chart)
    nab2 = _nabla_fn(nab, field.rank + 1, chart)
    return TensorField(chart, field.rank,
                       lambda x: _trace(nab2(x), field.rank + 2, _ginv(chart, x), 1),
                       field.symmetric)


def i_op(field: TensorField, times: int = 1) -> TensorField:
    chart = field.chart
    return TensorField(chart, field.rank + 2 * times,
                       lambda x: _mul_metric(field.fn(x), field.rank, _g(chart, x), times))


def j_op(field: TensorField, times: int = 1) -> TensorField:
    chart = field.chart
    if field.rank < 2 * times:
        raise ValueError("trace needs rank >= 2")
    return TensorField(chart, field.rank - 2 * times,
                       lambda x: _trace(field.fn(x), field.rank, _ginv(chart, x), times))


def p_op(field: TensorField) -> TensorField:
    chart = field.chart
    return TensorField(chart, field.rank,
                       lambda x: _project_p(field.fn(x), field.rank, _g(chart, x), _ginv(chart, x)))


def q_op(field: TensorField) -> TensorField:
    chart = field.chart
    return TensorField(chart, field.rank,
                       lambda x: _project_q(field.fn(x), field.rank, _g(chart, x), _ginv(chart, x)))


def ji_inverse_op(field: TensorField) -> TensorField:
    chart = field.chart
    return TensorField(chart, field.rank,
                       lambda x: _ji_inverse(field.fn(x), field.rank, _g(chart, x), _ginv(chart, x)))


def curvature_op(field: TensorField) -> TensorField:
    """Pointwise application of the curvature operator R."""
    chart = field.chart

    def fn(x):
        R, ric = _curvature(chart, x)
        return curvature_action_full(field.fn(x), field.rank, R, ric, _ginv(chart, x))

    return TensorField(chart, field.rank, fn)


def second_commutator(field: TensorField) -> TensorField:
    """Raw rank m+2 field (nabla_j nabla_k - nabla_k nabla_j) u, axes (j, k, i...)."""
    nab2 = _nabla_fn(_nabla_fn(field.fn, field.rank, field.chart), field.rank + 1, field.chart)
    return TensorField(field.chart, field.rank + 2, lambda x: nab2(x) - jnp.swapaxes(nab2(x), 0, 1), False)


def curvature_commutator_rhs(field: TensorField) -> TensorField:
    """sum_a R^p_{i_a k j} u_{.. p ..} arranged with axes (j, k, i...)."""
    chart, m = field.chart, field.rank

    def fn(x):
        R, _ = _curvature(chart, x)
        Rup = jnp.einsum("pq,qikj->pikj", _ginv(chart, x), R)
        u = field.fn(x)
        out = 0.0
        for a in range(m):
            ua = jnp.moveaxis(u, a, 0)
            t = jnp.einsum("pikj,p...->jki...", Rup, ua)
            out = out + jnp.moveaxis(t, 2, 2 + a)
        return out

    return TensorField(chart, m + 2, fn, False)


# --------------------------------------------------------------------------
# polynomial and constructed fields


def _monomial_exponents(n: int, degree: int) -> np.ndarray:
    import itertools

    exps = [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]
    return np.asarray(exps, dtype=np.int64)


def poly_field(chart: Chart, m: int, exponents: np.ndarray, coeffs: np.ndarray,
               center=None) -> TensorField:
    """Field with sorted-slot components sum_b coeffs[b] (x - center)^exponents[b]."""
    n = chart.dim
    exps = np.asarray(exponents, dtype=np.int64)
    D = int(exps.max()) if exps.size else 0
    cols = np.arange(n)[None, :]
    C = jnp.asarray(coeffs, dtype=jnp.float64)
    c0 = jnp.zeros(n) if center is None else jnp.asarray(center, dtype=jnp.float64)

    def fn(x):
        y = x - c0
        # powers by repeated products: y ** 0 would give NaN derivatives at y = 0
        pw = [jnp.ones_like(y)]
        for _ in range(D):
            pw.append(pw[-1] * y)
        mon = jnp.prod(jnp.stack(pw)[exps, cols], axis=1)
        return _dense.from_slots(mon @ C, m, n)

    return TensorField(chart, m, fn)


def random_poly_field(chart: Chart, m: int, degree: int, rng: np.random.Generator,
                      scale: float = 1.0) -> TensorField:
    """Random polynomial field centred at the middle of the box."""
    n = chart.dim
    exps = _monomial_exponents(n, degree)
    S = comb(n + m - 1, m)
    coeffs = scale * rng.standard_normal((exps.shape[0], S))
    center = 0.5 * (np.asarray(chart.lower) + np.asarray(chart.upper))
    return poly_field(chart, m, exps, coeffs, center)


def field_from_callable(chart: Chart, m: int, comp_fn: Callable) -> TensorField:
    """Field from ``comp_fn(x) -> sorted-slot components`` (jax-traceable)."""
    n = chart.dim
    return TensorField(chart, m, lambda x: _dense.from_slots(jnp.asarray(comp_fn(x)), m, n))


# --------------------------------------------------------------------------
# comparison helpers


def sup_norm(field: TensorField, X) -> float:
    vals = field.evaluate(X)
    return float(np.max(np.abs(vals))) if vals.size else 0.0


def max_residual(lhs: TensorField, rhs: TensorField, X, relative: bool = True) -> float:
    """max |lhs - rhs| over points, optionally divided by max(|lhs|, |rhs|, 1e-300)."""
    a = lhs.evaluate(X)
    b = rhs.evaluate(X)
    err = float(np.max(np.abs(a - b))) if a.size else 0.0
    if not relative:
        return err
    scale = max(float(np.max(np.abs(a))) if a.size else 0.0, float(np.max(np.abs(b))) if b.size else 0.0)
    return err / scale if scale > 0 else err


# --------------------------------------------------------------------------
# Green's formula


def _gauss_box(chart: Chart, order: int, axes: Sequence[int] | None = None):
    lo, hi = np.asarray(chart.lower), np.asarray(chart.upper)
    axes = range(chart.dim) if axes is None else axes
    t, w = np.polynomial.legendre.leggauss(order)
    pts, wts = [], []
    for a in axes:
        pts.append(0.5 * (lo[a] + hi[a]) + 0.5 * (hi[a] - lo[a]) * t)
        wts.append(0.5 * (hi[a] - lo[a]) * w)
    P = np.stack(np.meshgrid(*pts, indexing="ij"), axis=-1).reshape(-1, len(pts))
    W = np.prod(np.stack(np.meshgrid(*wts, indexing="ij"), axis=-1).reshape(-1, len(wts)), axis=1)
    return P, W


def greens_residual(u: TensorField, v: TensorField, order: int = 8) -> float:
    """|int_M (<du, v> + <u, delta v>) dV - int_dM <i_nu u, v> dV'| on the box.

    ``u`` has rank m-1 and ``v`` rank m.  Uses tensor Gauss-Legendre rules with
    ``order`` nodes per axis.
    """
    chart = u.chart
    if v.chart is not chart or v.rank != u.rank + 1:
        raise ValueError("need u of rank m-1 and v of rank m on the same chart")
    m = v.rank
    n = chart.dim
    du, dv = d_op(u), delta_op(v)

    def vol_integrand(x):
        g = _g(chart, x)
        gi = jnp.linalg.inv(g)
        a = _dense.inner(du.fn(x), v.fn(x), m, gi) + _dense.inner(u.fn(x), dv.fn(x), m - 1, gi)
        return a * jnp.sqrt(jnp.linalg.det(g))

    P, W = _gauss_box(chart, order)
    if not np.all(np.isfinite(W)):
        raise ValueError("quadrature failure")
    vol = float(np.sum(W * np.asarray(jax.vmap(vol_integrand)(jnp.asarray(P)))))

    bnd = 0.0
    for a in range(n):
        others = [b for b in range(n) if b != a]
        Q, Wq = _gauss_box(chart, order, others) if others else (np.zeros((1, 0)), np.ones(1))
        for side, val in ((-1.0, chart.lower[a]), (1.0, chart.upper[a])):
            X = np.empty((Q.shape[0], n))
            X[:, others] = Q
            X[:, a] = val

            def surf(x, a=a, side=side):
                g = _g(chart, x)
                gi = jnp.linalg.inv(g)
                nu = side * jnp.eye(n)[a] / jnp.sqrt(gi[a, a])
                iu = _dense.sym_product(nu, 1, u.fn(x), m - 1)
                dS = jnp.sqrt(jnp.linalg.det(g)) * jnp.sqrt(gi[a, a])
                return _dense.inner(iu, v.fn(x), m, gi) * dS

            bnd += float(np.sum(Wq * np.asarray(jax.vmap(surf)(jnp.asarray(X)))))
    return abs(vol - bnd)


__all__ = [
    "CONFORMAL_FACTORS",
    "Chart",
    "TensorField",
    "christoffel",
    "conformal_chart",
    "curvature",
    "curvature_action",
    "curvature_commutator_rhs",
    "curvature_op",
    "d_op",
    "delta_op",
    "euclidean_chart",
    "field_from_callable",
    "greens_residual",
    "i_op",
    "j_op",
    "ji_inverse_op",
    "laplace_op",
    "max_residual",
    "metric_derivative",
    "named_chart",
    "nabla",
    "p_op",
    "poly_field",
    "polar_chart",
    "q_op",
    "random_poly_field",
    "second_commutator",
    "sphere_patch_chart",
    "sup_norm",
]
