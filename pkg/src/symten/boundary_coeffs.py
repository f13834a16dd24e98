"""Exact rational coefficient tables for the boundary construction.

Two families of tables are provided:

* ``a(s, k)`` and ``b(s, k)``, the coefficients expressing the normal
  derivatives v^(2s), v^(2s+1) of a trace-free field through
  i^k j^(m-s+k) applied to the boundary data u^(2m), u^(2m+1).  Both a
  closed double-factorial form and the defining recurrence are implemented.
* ``a_p`` and ``b_p``, binomial expressions used in the jet argument for
  conformal Killing tensors, with their support ranges.

Everything here is exact (:class:`fractions.Fraction`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm

import numpy as np

from . import _dense
from .metric_ops import MetricPoint
from .symcore import SymTensor


def double_factorial(k: int) -> int:
    """k!! with the convention (-1)!! = 0!! = 1."""
    if k < -1:
        raise ValueError(f"double factorial undefined for {k}")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def _sign(e: int) -> int:
    return 1 if e % 2 == 0 else -1


def _check_range(n: int, m: int, s: int, k: int):
    if n < 2:
        raise ValueError("need n >= 2")
    if not (0 <= k <= s <= m):
        raise ValueError(f"need 0 <= k <= s <= m, got s={s}, k={k}, m={m}")


def a_coeff(n: int, m: int, s: int, k: int) -> Fraction:
    """Closed form of a(s, k)."""
    _check_range(n, m, s, k)
    df = double_factorial
    return (
        Fraction(_sign(m - s - k), 2)
        * Fraction(factorial(s) * df(2 * s - 1) * factorial(m - s), df(n + 2 * m + 2 * s - 1))
        * Fraction(
            df(n + 2 * m + 2 * s - 2 * k - 3),
            factorial(s - k) * factorial(m - s + k + 1) * df(2 * s - 2 * k - 1),
        )
    )


def b_coeff(n: int, m: int, s: int, k: int) -> Fraction:
    """Closed form of b(s, k)."""
    _check_range(n, m, s, k)
    df = double_factorial
    return (
        _sign(m - s - k)
        * Fraction(factorial(s) * df(2 * s + 1) * df(2 * m - 2 * s - 1), df(n + 2 * m + 2 * s))
        * Fraction(
            2**k * df(n + 2 * m + 2 * s - 2 * k - 2),
            factorial(s - k) * df(2 * m - 2 * s + 2 * k + 1) * df(2 * s - 2 * k + 1),
        )
    )


@lru_cache(maxsize=None)
def a_recurrence(n: int, m: int, s: int, k: int) -> Fraction:
    """a(s, k) from its two-term recurrence in (s, k).

    The step factor is s(2s-1)/((m-s+1)(n+2m+2s-1)); this is what the
    defining relation between consecutive normal derivatives produces.
    """
    _check_range(n, m, s, k)
    if k == 0:
        return Fraction(_sign(m - s), 2 * (m - s + 1) * (n + 2 * m + 2 * s - 1))
    return Fraction(s * (2 * s - 1), (m - s + 1) * (n + 2 * m + 2 * s - 1)) * a_recurrence(
        n, m, s - 1, k - 1
    )


def a_recurrence_without_s(n: int, m: int, s: int, k: int) -> Fraction:
    """Variant with step factor (2s-1)/(...) (no leading s); kept for comparison."""
    _check_range(n, m, s, k)
    if k == 0:
        return Fraction(_sign(m - s), 2 * (m - s + 1) * (n + 2 * m + 2 * s - 1))
    return Fraction(2 * s - 1, (m - s + 1) * (n + 2 * m + 2 * s - 1)) * a_recurrence_without_s(
        n, m, s - 1, k - 1
    )


@lru_cache(maxsize=None)
def b_recurrence(n: int, m: int, s: int, k: int) -> Fraction:
    _check_range(n, m, s, k)
    if k == 0:
        return Fraction(_sign(m - s), (2 * m - 2 * s + 1) * (n + 2 * m + 2 * s))
    return Fraction(2 * s * (2 * s + 1), (2 * m - 2 * s + 1) * (n + 2 * m + 2 * s)) * b_recurrence(
        n, m, s - 1, k - 1
    )


@dataclass(frozen=True)
class CoeffTable:
    """Exact table {(s, k): value} for fixed (n, m)."""

    name: str
    n: int
    m: int
    provenance: str
    values: dict = field(default_factory=dict)

    def rows(self):
        for (s, k), v in sorted(self.values.items()):
            yield s, k, v.numerator, v.denominator

    def to_csv(self) -> str:
        lines = ["s,k,numerator,denominator"]
        lines += [f"{s},{k},{p},{q}" for s, k, p, q in self.rows()]
        return "\n".join(lines) + "\n"


def coeff_table(name: str, n: int, m: int, provenance: str = "closed-form") -> CoeffTable:
    """Table of ``a`` or ``b`` over 0 <= k <= s <= m."""
    funcs = {
        ("a", "closed-form"): a_coeff,
        ("a", "recurrence"): a_recurrence,
        ("b", "closed-form"): b_coeff,
        ("b", "recurrence"): b_recurrence,
    }
    if (name, provenance) not in funcs:
        raise ValueError(f"unknown table {name!r} / provenance {provenance!r}")
    f = funcs[(name, provenance)]
    vals = {(s, k): f(n, m, s, k) for s in range(m + 1) for k in range(s + 1)}
    return CoeffTable(name, n, m, provenance, vals)


def _a0(n, m, s, k):
    return a_coeff(n, m, s, k) if 0 <= k <= s else Fraction(0)


def _b0(n, m, s, k):
    return b_coeff(n, m, s, k) if 0 <= k <= s else Fraction(0)


def a_relation_terms(n: int, m: int):
    """Values of the three-term a-relation for 0 <= k <= s <= m-1."""
    for s in range(m):
        for k in range(s + 1):
            yield (s, k), (
                _a0(n, m, s, k)
                + Fraction((s - k + 1) * (2 * s - 2 * k + 1), (s + 1) * (2 * s + 1)) * _a0(n, m, s + 1, k)
                + Fraction((k + 1) * (n + 4 * s - 2 * k - 1), (s + 1) * (2 * s + 1)) * _a0(n, m, s + 1, k + 1)
            )


def b_relation_terms(n: int, m: int, alt_denominator: bool = False):
    """Values of the three-term b-relation for 0 <= k <= s <= m-1.

    The last denominator is (s+1)(2s+3), which is what commuting j past i^k
    gives for tensors of odd rank 2s-2k+3; ``alt_denominator=True`` uses (s+1)(2s+1)
    instead (that variant does not vanish).
    """
    last = (lambda s: (s + 1) * (2 * s + 1)) if alt_denominator else (lambda s: (s + 1) * (2 * s + 3))
    for s in range(m):
        for k in range(s + 1):
            yield (s, k), (
                _b0(n, m, s, k)
                + Fraction((s - k + 1) * (2 * s - 2 * k + 3), (s + 1) * (2 * s + 3)) * _b0(n, m, s + 1, k)
                + Fraction((k + 1) * (n + 4 * s - 2 * k + 1), last(s)) * _b0(n, m, s + 1, k + 1)
            )


def verify_a_relation(n: int, m: int) -> bool:
    return all(v == 0 for _, v in a_relation_terms(n, m))


def verify_b_relation(n: int, m: int, alt_denominator: bool = False) -> bool:
    return all(v == 0 for _, v in b_relation_terms(n, m, alt_denominator))


def verify_closed_forms(n: int, m: int) -> bool:
    return all(
        a_coeff(n, m, s, k) == a_recurrence(n, m, s, k) and b_coeff(n, m, s, k) == b_recurrence(n, m, s, k)
        for s in range(m + 1)
        for k in range(s + 1)
    )


# --------------------------------------------------------------------------
# normal-derivative tensors


def _ij_power(u, rank: int, g: MetricPoint, ki: int, kj: int):
    t = _dense.trace(u, rank, g.g_inv, kj) if kj else u
    return _dense.mul_metric(t, rank - 2 * kj, g.g, ki) if ki else t


def normal_derivative_tensors(u2m: SymTensor, u2m1: SymTensor, g: MetricPoint, n: int, m: int
                              ) -> list[SymTensor]:
    """Tensors v^(0), ..., v^(2m+1) built from the tables a and b.

    ``u2m`` (rank 2m) and ``u2m1`` (rank 2m+1) live on the boundary, whose
    metric ``g`` has dimension n-1; ``n`` is the dimension of the ambient
    manifold.  The field whose normal derivative these are has odd rank 2m+1.
    """
    if u2m.rank != 2 * m or u2m1.rank != 2 * m + 1:
        raise ValueError(f"need ranks {2 * m} and {2 * m + 1}, got {u2m.rank} and {u2m1.rank}")
    if g.dim != n - 1 or u2m.dim != n - 1 or u2m1.dim != n - 1:
        raise ValueError("boundary tensors and metric must have dimension n-1")
    U0, U1 = u2m.full(), u2m1.full()
    nb = n - 1
    out: list[SymTensor] = []
    for s in range(m + 1):
        for parity, (U, rank, coef) in enumerate(((U0, 2 * m, a_coeff), (U1, 2 * m + 1, b_coeff))):
            total = None
            for k in range(s + 1):
                term = _ij_power(U, rank, g, k, m - s + k) * _dense.cast(coef(n, m, s, k), U)
                total = term if total is None else total + term
            out.append(SymTensor.from_full(total, 2 * s + parity, nb))
    return out


def normal_derivative_recursive(u_top: SymTensor, u_next: SymTensor, g: MetricPoint, n: int,
                                r: int) -> list[SymTensor]:
    """v^(0..r) by direct recursion, for a field of any rank r.

    Solves (r+1-s)(n+r+s-2) v^(s) - s(s-1) i v^(s-2) = u^(s) with
    u^(s) = (-j)^((r-s)/2) u_top (same parity as r) or
    (-j)^((r-1-s)/2) u_next (other parity).  For odd r this reproduces the
    closed tables; the even-r case is experimental.
    """
    if u_top.rank != r or u_next.rank != r - 1:
        raise ValueError("need ranks r and r-1")
    nb = n - 1
    v: list = [None] * (r + 1)
    for s in range(r + 1):
        if (r - s) % 2 == 0:
            e = (r - s) // 2
            us = np.asarray(_ij_power(u_top.full(), r, g, 0, e) * _sign(e))
        else:
            e = (r - 1 - s) // 2
            us = np.asarray(_ij_power(u_next.full(), r - 1, g, 0, e) * _sign(e))
        rhs = us
        if s >= 2:
            rhs = rhs + s * (s - 1) * _dense.mul_metric(v[s - 2], s - 2, g.g)
        v[s] = np.asarray(rhs * _dense.cast(Fraction(1, (r + 1 - s) * (n + r + s - 2)), us))
    return [SymTensor.from_full(x, s, nb) for s, x in enumerate(v)]


def trace_chain_residuals(v: list[SymTensor], g: MetricPoint) -> list[SymTensor]:
    """v^(s) + j v^(s+2) for every s with s+2 in range."""
    from .metric_ops import trace

    return [v[s] + trace(v[s + 2], g) for s in range(len(v) - 2)]


def recurrence_residuals(v: list[SymTensor], u2m: SymTensor, u2m1: SymTensor, g: MetricPoint,
                         n: int, m: int) -> list[SymTensor]:
    """Left minus right sides of the two recurrences linking v^(s) to the data."""
    from .metric_ops import mul_metric, trace

    res = []
    for s in range(m + 1):
        for parity, U in ((0, u2m), (1, u2m1)):
            idx = 2 * s + parity
            if parity == 0:
                c0 = 2 * (m - s + 1) * (n + 2 * m + 2 * s - 1)
                c1 = 2 * s * (2 * s - 1)
            else:
                c0 = (2 * m - 2 * s + 1) * (n + 2 * m + 2 * s)
                c1 = 2 * s * (2 * s + 1)
            lhs = v[idx] * c0
            if s >= 1:
                lhs = lhs - mul_metric(v[idx - 2], g) * c1
            rhs = trace(U, g, m - s) * _sign(m - s) if m - s else U
            res.append(lhs - rhs)
    return res


# --------------------------------------------------------------------------
# coefficients of the jet argument


def support_p(m: int, l: int) -> tuple[int, int, int, int]:
    """(p1, p2, p3, p4): supports [p1, p2] of a_p and [p3, p4] of b_p."""
    return max(0, l - m - 1), min(m - 1, l), max(0, l - m + 1), min(m - 1, l + 1)


def _check_l(m: int, l: int):
    if m < 1:
        raise ValueError("need m >= 1")
    if not 0 <= l <= 2 * m:
        raise ValueError(f"need 0 <= l <= 2m, got l={l}")


def ap_coeff(n: int, m: int, l: int, p: int) -> Fraction:
    C = _dense.binom
    _check_l(m, l)
    val = (
        ((n + 2 * m - 4) * C(m + 1, l - p) + 2 * C(m - 1, l - p - 1) + C(m - 1, l - p - 2)) * C(m - 1, p)
        - (m - 1) * (2 * C(m, l - p) + C(m, l - p - 1)) * C(m - 2, p - 1)
    )
    return Fraction(val)


def bp_coeff(m: int, l: int, p: int) -> Fraction:
    C = _dense.binom
    _check_l(m, l)
    return Fraction((m - 1) * C(m, l - p + 1) * C(m - 2, p - 1) - C(m - 1, l - p) * C(m - 1, p))


def support_violations(n: int, m: int) -> list[str]:
    """All failures of the support and endpoint-nonvanishing claims for (n, m)."""
    bad = []
    for l in range(2 * m + 1):
        p1, p2, p3, p4 = support_p(m, l)
        for p in range(-2, 2 * m + 3):
            a = ap_coeff(n, m, l, p)
            b = bp_coeff(m, l, p)
            if not p1 <= p <= p2 and a != 0:
                bad.append(f"a_p nonzero outside support: n={n} m={m} l={l} p={p}")
            if not p3 <= p <= p4 and b != 0:
                bad.append(f"b_p nonzero outside support: n={n} m={m} l={l} p={p}")
        if p1 <= p2:
            if ap_coeff(n, m, l, p1) == 0:
                bad.append(f"a_p1 vanishes: n={n} m={m} l={l}")
            if ap_coeff(n, m, l, p2) == 0:
                bad.append(f"a_p2 vanishes: n={n} m={m} l={l}")
    return bad


def random_rational_tensor(rng: np.random.Generator, n: int, m: int) -> SymTensor:
    return SymTensor.random(rng, n, m, exact=True)


# --------------------------------------------------------------------------
# trace-free chain in the polynomial model
#
# kappa turns a symmetric tensor of rank r on R^k into a homogeneous
# polynomial of degree r.  For the Euclidean metric i becomes multiplication by
# |xi|^2 and j becomes the xi-Laplacian divided by r(r-1), so the chain can be
# checked on integer coefficient vectors without ever forming k^r arrays.


@lru_cache(maxsize=None)
def _monomials(k: int, d: int) -> np.ndarray:
    """Exponent rows of all degree-d monomials in k variables."""
    if k == 0:
        return np.zeros((1 if d == 0 else 0, 0), dtype=np.int64)
    if k == 1:
        return np.array([[d]], dtype=np.int64)
    rows = []
    for a in range(d, -1, -1):
        tail = _monomials(k - 1, d - a)
        rows.append(np.concatenate([np.full((len(tail), 1), a), tail], axis=1))
    return np.concatenate(rows)


@lru_cache(maxsize=None)
def _shift_map(k: int, d: int, a: int, step: int):
    """Source rows, target rows and e_a(e_a-1) factors for x_a^step shifts."""
    E = _monomials(k, d)
    F = E.copy()
    F[:, a] += step
    sel = np.nonzero(F[:, a] >= 0)[0]
    base = (d + 3) ** np.arange(k)
    T = _monomials(k, d + step)
    keys = T @ base
    order = np.argsort(keys)
    tgt = order[np.searchsorted(keys[order], F[sel] @ base)]
    fac = np.array([int(e) * (int(e) - 1) for e in E[sel, a]], dtype=object)
    return sel, tgt, fac


def _poly_zeros(k: int, d: int) -> np.ndarray:
    out = np.empty(len(_monomials(k, d)), dtype=object)
    out[:] = 0
    return out


def _poly_laplace(P: np.ndarray, k: int, d: int) -> np.ndarray:
    out = _poly_zeros(k, d - 2)
    for a in range(k):
        sel, tgt, fac = _shift_map(k, d, a, -2)
        out[tgt] += P[sel] * fac
    return out


def _poly_times_r2(P: np.ndarray, k: int, d: int) -> np.ndarray:
    out = _poly_zeros(k, d + 2)
    for a in range(k):
        sel, tgt, _ = _shift_map(k, d, a, 2)
        out[tgt] += P[sel]
    return out


def trace_chain_failures(n: int, m: int, rng: np.random.Generator, a=None, b=None) -> list[str]:
    """Exact check of v^(s) + j v^(s+2) = 0 on random rational boundary data.

    Works in the polynomial model over the Euclidean boundary metric, so it
    reaches ranks that dense tensors cannot.  Random rationals with a common
    denominator are scaled to integers first; the chain is linear, so this
    loses nothing.  ``a`` and ``b`` override the coefficient functions (used
    to confirm that wrong tables are detected).  Returns failure messages.
    """
    if n < 2 or m < 1:
        raise ValueError("need n >= 2 and m >= 1")
    a = a_coeff if a is None else a
    b = b_coeff if b is None else b
    k = n - 1
    bad = []
    for parity, coef in ((0, a), (1, b)):
        r = 2 * m + parity
        size = len(_monomials(k, r))
        num = rng.integers(-9, 10, size)
        den = rng.integers(1, 10, size)
        data = [Fraction(int(p), int(q)) for p, q in zip(num, den)]
        L = lcm(*[x.denominator for x in data])
        P = np.array([int(x * L) for x in data], dtype=object)
        laps = [P]
        for l in range(1, m + 1):
            laps.append(_poly_laplace(laps[-1], k, r - 2 * l + 2))
        # scale[s] * kappa(v^(2s+parity)) is kept as an integer polynomial
        V, scale = [], []
        for s in range(m + 1):
            cs = [coef(n, m, s, t) * Fraction(factorial(r - 2 * (m - s + t)), factorial(r))
                  for t in range(s + 1)]
            D = lcm(*[c.denominator for c in cs])
            acc, deg = None, None
            for t in range(s, -1, -1):  # Horner in |xi|^2
                term = laps[m - s + t] * int(cs[t] * D)
                if acc is None:
                    acc, deg = term, r - 2 * (m - s + t)
                else:
                    acc = _poly_times_r2(acc, k, deg) + term
                    deg += 2
            V.append(acc)
            scale.append(D)
        for s in range(m):
            d2 = 2 * s + 2 + parity
            res = V[s] * (scale[s + 1] * d2 * (d2 - 1)) + _poly_laplace(V[s + 1], k, d2) * scale[s]
            if any(x != 0 for x in res):
                bad.append(f"chain fails: n={n} m={m} rank {2 * s + parity} vs {d2}")
    return bad


__all__ = [
    "CoeffTable",
    "a_coeff",
    "a_recurrence",
    "a_recurrence_without_s",
    "ap_coeff",
    "b_coeff",
    "b_recurrence",
    "bp_coeff",
    "coeff_table",
    "double_factorial",
    "a_relation_terms",
    "b_relation_terms",
    "normal_derivative_recursive",
    "normal_derivative_tensors",
    "recurrence_residuals",
    "support_p",
    "support_violations",
    "trace_chain_failures",
    "trace_chain_residuals",
    "verify_closed_forms",
    "verify_a_relation",
    "verify_b_relation",
]
