"""Polynomial tensor fields on flat Euclidean space.

A :class:`PolyTensorField` stores, for every monomial x^e with all exponents
``e_a <= D``, the full (n,)*m component array of its coefficient.  The
coefficient array has shape ``(D+1,)*n + (n,)*m`` so the dense kernels apply
with the exponent axes as batch axes.  Derivatives are exact: they shift the
exponent axes.  Coefficients are floats or :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from . import _dense
from .symcore import SymTensor


def _identity(n: int, exact: bool) -> np.ndarray:
    if exact:
        return np.array([[Fraction(int(i == j)) for j in range(n)] for i in range(n)], dtype=object)
    return np.eye(n)


@dataclass(frozen=True, eq=False)
class PolyTensorField:
    """Rank-m tensor field with polynomial components on R^n (flat metric)."""

    dim: int
    rank: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        n, m = self.dim, self.rank
        if c.ndim != n + m or c.shape[n:] != (n,) * m:
            raise ValueError(f"coefficient array has shape {c.shape}, expected (D+1,)*{n} + ({n},)*{m}")
        if len(set(c.shape[:n])) != 1:
            raise ValueError("exponent axes must share one length")
        object.__setattr__(self, "coeffs", c)

    # ------------------------------------------------------------------
    # construction

    @property
    def degree_cap(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    @classmethod
    def zeros(cls, n: int, m: int, D: int, exact: bool = False) -> "PolyTensorField":
        shape = (D + 1,) * n + (n,) * m
        if exact:
            c = np.empty(shape, dtype=object)
            c[...] = Fraction(0)
        else:
            c = np.zeros(shape)
        return cls(n, m, c)

    @classmethod
    def from_terms(cls, n: int, m: int, D: int, terms: dict, exact: bool = False) -> "PolyTensorField":
        """Build from {(exponents, sorted 0-based slot): coefficient}."""
        out = cls.zeros(n, m, D, exact)
        comps = _dense.to_slots(out.coeffs, m, n).copy()
        lookup = {t: s for s, t in enumerate(_dense.sorted_indices(n, m))}
        for (e, slot), c in terms.items():
            comps[tuple(e) + (lookup[tuple(sorted(slot))],)] += Fraction(c) if exact else float(c)
        return cls(n, m, _dense.from_slots(comps, m, n))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, m: int, degree: int, exact: bool = False,
               D: int | None = None) -> "PolyTensorField":
        """Random field with total degree <= ``degree`` (small integers when exact)."""
        D = degree if D is None else D
        S = comb(n + m - 1, m)
        shape = (D + 1,) * n + (S,)
        mask = _total_degree(n, D) <= degree
        if exact:
            vals = rng.integers(-4, 5, size=shape)
            comps = np.empty(shape, dtype=object)
            for idx in np.ndindex(shape):
                comps[idx] = Fraction(int(vals[idx])) if mask[idx[:n]] else Fraction(0)
        else:
            comps = rng.standard_normal(shape) * mask[..., None]
        return cls(n, m, _dense.from_slots(comps, m, n))

    # ------------------------------------------------------------------
    # arithmetic

    def _same(self, other: "PolyTensorField"):
        if (other.dim, other.rank) != (self.dim, self.rank):
            raise ValueError("fields must share dimension and rank")

    def _pad(self, D: int) -> np.ndarray:
        extra = D - self.degree_cap
        if extra <= 0:
            return self.coeffs
        pad = [(0, extra)] * self.dim + [(0, 0)] * self.rank
        if self.exact:
            return np.pad(self.coeffs, pad, constant_values=Fraction(0))
        return np.pad(self.coeffs, pad)

    def __add__(self, other: "PolyTensorField") -> "PolyTensorField":
        self._same(other)
        D = max(self.degree_cap, other.degree_cap)
        return PolyTensorField(self.dim, self.rank, self._pad(D) + other._pad(D))

    def __sub__(self, other: "PolyTensorField") -> "PolyTensorField":
        return self + other * -1

    def __mul__(self, c) -> "PolyTensorField":
        c = Fraction(c) if self.exact and not isinstance(c, float) else c
        return PolyTensorField(self.dim, self.rank, self.coeffs * c)

    __rmul__ = __mul__

    def max_abs(self) -> float:
        c = self.coeffs
        return float(np.max(np.abs(c.astype(float)))) if c.size else 0.0

    def is_zero(self) -> bool:
        return bool(np.all(self.coeffs == 0))

    def to_float(self) -> "PolyTensorField":
        return PolyTensorField(self.dim, self.rank, self.coeffs.astype(float))

    # ------------------------------------------------------------------
    # evaluation

    def evaluate(self, X) -> np.ndarray:
        """Full component arrays at points X of shape (P, n)."""
        X = np.asarray(X, dtype=float)
        n, D = self.dim, self.degree_cap
        powers = X[:, :, None] ** np.arange(D + 1)[None, None, :]  # (P, n, D+1)
        out = np.einsum("pk,k...->p...", powers[:, 0, :], self.coeffs.astype(float))
        for a in range(1, n):
            out = np.einsum("pk,pk...->p...", powers[:, a, :], out)
        return out

    def at(self, x) -> SymTensor:
        return SymTensor.from_full(self.evaluate(np.asarray(x, dtype=float)[None])[0], self.rank, self.dim)

    # ------------------------------------------------------------------
    # flat-space operators

    def partial(self, a: int) -> "PolyTensorField":
        """Coordinate derivative d/dx_a of every component."""
        c = np.moveaxis(self.coeffs, a, 0)
        k = np.arange(1, c.shape[0])
        if self.exact:
            k = k.astype(object)
        shifted = c[1:] * k.reshape((-1,) + (1,) * (c.ndim - 1))
        tail = np.zeros_like(c[:1]) if not self.exact else np.full_like(c[:1], Fraction(0))
        return PolyTensorField(self.dim, self.rank, np.moveaxis(np.concatenate([shifted, tail]), 0, a))

    def nabla_raw(self) -> np.ndarray:
        """Coefficients of the raw derivative, derivative index first among tensor axes."""
        n = self.dim
        parts = [self.partial(a).coeffs for a in range(n)]
        return np.stack(parts, axis=n)

    def d(self) -> "PolyTensorField":
        m = self.rank + 1
        return PolyTensorField(self.dim, m, _dense.symmetrize(self.nabla_raw(), m))

    def delta(self) -> "PolyTensorField":
        if self.rank < 1:
            raise ValueError("divergence needs rank >= 1")
        I = _identity(self.dim, self.exact)
        return PolyTensorField(self.dim, self.rank - 1, _dense.trace(self.nabla_raw(), self.rank + 1, I))

    def laplace(self) -> "PolyTensorField":
        out = None
        for a in range(self.dim):
            t = self.partial(a).partial(a)
            out = t if out is None else out + t
        return out

    def i(self, times: int = 1) -> "PolyTensorField":
        I = _identity(self.dim, self.exact)
        return PolyTensorField(self.dim, self.rank + 2 * times,
                               _dense.mul_metric(self.coeffs, self.rank, I, times))

    def j(self, times: int = 1) -> "PolyTensorField":
        if self.rank < 2 * times:
            raise ValueError("trace needs rank >= 2")
        I = _identity(self.dim, self.exact)
        return PolyTensorField(self.dim, self.rank - 2 * times, _dense.trace(self.coeffs, self.rank, I, times))

    def p(self) -> "PolyTensorField":
        I = _identity(self.dim, self.exact)
        return PolyTensorField(self.dim, self.rank, _dense.project_p(self.coeffs, self.rank, I, I))

    def q(self) -> "PolyTensorField":
        return self - self.p()

    def power(self, op: str, k: int) -> "PolyTensorField":
        out = self
        for _ in range(k):
            out = getattr(out, op)()
        return out

    def to_tensor_field(self, chart):
        """Wrap as a :class:`symten.geom.TensorField` on ``chart``."""
        import jax.numpy as jnp

        from .geom import TensorField

        if chart.dim != self.dim:
            raise ValueError("chart dimension mismatch")
        n, D = self.dim, self.degree_cap
        C = jnp.asarray(self.coeffs.astype(float))

        def fn(x):
            out = C
            for a in range(n):
                # repeated products keep derivatives finite at x[a] = 0
                pw = [jnp.ones_like(x[a])]
                for _ in range(D):
                    pw.append(pw[-1] * x[a])
                out = jnp.tensordot(jnp.stack(pw), out, axes=([0], [0]))
            return out

        return TensorField(chart, self.rank, fn)


def _total_degree(n: int, D: int) -> np.ndarray:
    grids = np.meshgrid(*([np.arange(D + 1)] * n), indexing="ij")
    return sum(grids)


def _choose(i: int, j: int) -> int:
    return _dense.binom(i, j)


def _fact(i: int):
    return factorial(i) if i >= 0 else 0


def delta_d_power_rhs(u: PolyTensorField, k: int, l: int) -> PolyTensorField | None:
    """Right side of the flat identity for delta^l d^k u (None when it vanishes)."""
    m = u.rank
    coef = Fraction(_fact(l) * _fact(m + k - l), factorial(m + k))
    out = None
    for p in range(0, min(k, l) + 1):
        c = _choose(k, p) * _choose(m, l - p)
        if c == 0 or coef == 0:
            continue
        t = u.power("delta", l - p).power("laplace", p).power("d", k - p) * (coef * c if u.exact else float(coef * c))
        out = t if out is None else out + t
    return out


def j_d_power_rhs(u: PolyTensorField, k: int) -> PolyTensorField:
    """Right side of the flat identity for j d^k u (needs m + k >= 2)."""
    m = u.rank
    if m + k < 2:
        raise ValueError("needs m + k >= 2")

    def c(x):
        x = Fraction(x, (m + k - 1) * (m + k))
        return x if u.exact else float(x)

    out = None
    if k >= 1 and m >= 1:
        out = u.delta().power("d", k - 1) * c(2 * k * m)
    if k >= 2:
        t = u.laplace().power("d", k - 2) * c(k * (k - 1))
        out = t if out is None else out + t
    if m >= 2:
        t = u.j().power("d", k) * c(m * (m - 1))
        out = t if out is None else out + t
    if out is None:
        out = PolyTensorField.zeros(u.dim, m + k - 2, u.degree_cap, u.exact)
    return out


__all__ = ["PolyTensorField", "delta_d_power_rhs", "j_d_power_rhs"]
