"""Dense symmetric tensors stored by sorted multi-index.

A :class:`SymTensor` of rank ``m`` in dimension ``n`` keeps one component per
nondecreasing multi-index, ``C(n+m-1, m)`` in total, in lexicographic order.
Components may be floats or exact :class:`fractions.Fraction` values.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np

from . import _dense

SYM_TOL = 1e-9


def dim_sym(n: int, m: int) -> int:
    """Number of independent components of a symmetric rank-m tensor."""
    if n < 1 or m < 0:
        raise ValueError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    return comb(n + m - 1, m)


@dataclass(frozen=True)
class MultiIndex:
    """Nondecreasing index tuple with entries in 1..n."""

    entries: tuple[int, ...]
    dim: int

    def __post_init__(self):
        e = tuple(self.entries)
        if any(a > b for a, b in zip(e, e[1:])):
            raise ValueError(f"multi-index {e} is not sorted")
        if any(x < 1 or x > self.dim for x in e):
            raise ValueError(f"multi-index {e} has entries outside 1..{self.dim}")
        object.__setattr__(self, "entries", e)

    @property
    def rank(self) -> int:
        return len(self.entries)

    @property
    def multiplicity(self) -> int:
        return _dense.multinomial(Counter(self.entries).values())

    @classmethod
    def enumerate(cls, n: int, m: int) -> list["MultiIndex"]:
        return [cls(tuple(i + 1 for i in t), n) for t in _dense.sorted_indices(n, m)]


def _as_array(comps, exact: bool):
    if exact:
        arr = np.empty(len(comps), dtype=object)
        arr[:] = [Fraction(c) for c in comps]
        return arr
    return np.asarray(comps, dtype=float)


@dataclass(frozen=True, eq=False)
class SymTensor:
    """Symmetric covariant tensor; ``comps`` in sorted multi-index order."""

    dim: int
    rank: int
    comps: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.comps)
        if comps.dtype != object:
            comps = comps.astype(float)
        comps = comps.reshape(-1)
        if comps.size != dim_sym(self.dim, self.rank):
            raise ValueError(
                f"expected {dim_sym(self.dim, self.rank)} components, got {comps.size}"
            )
        if comps.dtype != object and not np.all(np.isfinite(comps)):
            raise ValueError("components must be finite")
        comps.flags.writeable = False
        object.__setattr__(self, "comps", comps)

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, n: int, m: int, exact: bool = False) -> "SymTensor":
        return cls(n, m, _as_array([0] * dim_sym(n, m), exact))

    @classmethod
    def scalar(cls, c, n: int) -> "SymTensor":
        exact = isinstance(c, (Fraction, int)) and not isinstance(c, bool)
        return cls(n, 0, _as_array([c], exact and isinstance(c, Fraction)))

    @classmethod
    def from_full(cls, arr, m: int | None = None, n: int | None = None) -> "SymTensor":
        """Build from a full (n,)*m array that is already symmetric."""
        arr = np.asarray(arr)
        m = arr.ndim if m is None else m
        if n is None:
            n = arr.shape[-1] if m else 1
        return cls(n, m, _dense.to_slots(arr, m, n))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, m: int, exact: bool = False):
        if exact:
            vals = [Fraction(int(x), int(d)) for x, d in
                    zip(rng.integers(-9, 10, dim_sym(n, m)), rng.integers(1, 6, dim_sym(n, m)))]
            return cls(n, m, _as_array(vals, True))
        return cls(n, m, rng.standard_normal(dim_sym(n, m)))

    @classmethod
    def basis(cls, n: int, m: int, slot: int) -> "SymTensor":
        c = np.zeros(dim_sym(n, m))
        c[slot] = 1.0
        return cls(n, m, c)

    # access -----------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.comps.dtype == object

    def full(self) -> np.ndarray:
        """Full (n,)*m component array."""
        if self.rank == 0:
            return self.comps.reshape(())
        return _dense.from_slots(self.comps, self.rank, self.dim)

    def __getitem__(self, index: Sequence[int]):
        """Component at a 1-based index tuple, in any order."""
        key = tuple(sorted(int(i) - 1 for i in index))
        if len(key) != self.rank or any(k < 0 or k >= self.dim for k in key):
            raise IndexError(f"bad index {tuple(index)} for rank {self.rank}, dim {self.dim}")
        return self.comps[_dense.sorted_indices(self.dim, self.rank).index(key)]

    def items(self):
        for mi, c in zip(MultiIndex.enumerate(self.dim, self.rank), self.comps):
            yield mi, c

    # arithmetic -------------------------------------------------------
    def _check(self, other: "SymTensor"):
        if self.dim != other.dim or self.rank != other.rank:
            raise ValueError(
                f"shape mismatch: (n={self.dim}, m={self.rank}) vs (n={other.dim}, m={other.rank})"
            )

    def __add__(self, other: "SymTensor") -> "SymTensor":
        self._check(other)
        return SymTensor(self.dim, self.rank, self.comps + other.comps)

    def __sub__(self, other: "SymTensor") -> "SymTensor":
        self._check(other)
        return SymTensor(self.dim, self.rank, self.comps - other.comps)

    def __neg__(self) -> "SymTensor":
        return SymTensor(self.dim, self.rank, -self.comps)

    def __mul__(self, c) -> "SymTensor":
        return SymTensor(self.dim, self.rank, self.comps * c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "SymTensor":
        return SymTensor(self.dim, self.rank, self.comps / c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymTensor):
            return NotImplemented
        return (self.dim, self.rank) == (other.dim, other.rank) and bool(
            np.all(self.comps == other.comps)
        )

    __hash__ = None

    def allclose(self, other: "SymTensor", rtol=1e-12, atol=1e-12) -> bool:
        self._check(other)
        return np.allclose(self.comps.astype(float), other.comps.astype(float), rtol=rtol, atol=atol)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.comps.astype(float)))) if self.comps.size else 0.0

    def __repr__(self) -> str:
        return f"SymTensor(n={self.dim}, m={self.rank}, comps={self.comps!r})"


@dataclass(frozen=True, eq=False)
class RawTensor:
    """Covariant tensor with no symmetry assumed; ``data`` has shape (n,)*m."""

    dim: int
    rank: int
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data)
        if data.shape != (self.dim,) * self.rank:
            raise ValueError(f"expected shape {(self.dim,) * self.rank}, got {data.shape}")
        object.__setattr__(self, "data", data)

    @classmethod
    def of(cls, arr) -> "RawTensor":
        arr = np.asarray(arr)
        return cls(arr.shape[0] if arr.ndim else 1, arr.ndim, arr)


def _raw_array(t) -> np.ndarray:
    return t.data if isinstance(t, RawTensor) else np.asarray(t)


def symmetrize(t) -> SymTensor:
    """Average of a raw tensor over all permutations of its slots."""
    arr = _raw_array(t)
    m = arr.ndim
    return SymTensor.from_full(_dense.symmetrize(arr, m), m)


def partial_symmetrize(t, group: Iterable[int]) -> RawTensor:
    """Average over permutations of the (1-based) slots in ``group`` only."""
    arr = _raw_array(t)
    group = sorted(set(int(g) for g in group))
    if any(g < 1 or g > arr.ndim for g in group):
        raise ValueError(f"slot positions {group} out of range 1..{arr.ndim}")
    return RawTensor.of(_dense.partial_symmetrize(arr, [g - 1 for g in group]))


def sym_product(u: SymTensor, v: SymTensor) -> SymTensor:
    """Symmetric product uv = sigma(u (x) v)."""
    if u.dim != v.dim:
        raise ValueError(f"dim mismatch: {u.dim} vs {v.dim}")
    full = _dense.sym_product(u.full(), u.rank, v.full(), v.rank)
    return SymTensor.from_full(full, u.rank + v.rank, u.dim)


def inner(u: SymTensor, v: SymTensor, g) -> float:
    """Metric inner product u_{i...} v^{i...}.

    ``g`` is a :class:`symten.metric_ops.MetricPoint`.
    """
    u._check(v)
    val = _dense.inner(u.full(), v.full(), u.rank, g.g_inv)
    if isinstance(val, np.ndarray):
        val = val[()]
    return val if (u.exact and v.exact) else float(val)


def invert_partial_symmetrization(f, m: int, p: int, rtol: float = SYM_TOL) -> RawTensor:
    """Solve sigma(first m+p slots) u = f for u with the companion symmetry.

    ``f`` has rank 2m+p and is symmetric in its first m+p slots and in its
    last m slots.  The returned ``u`` is symmetric in its first m slots and in
    its last m+p slots, and partial symmetrization of its first m+p slots
    gives back ``f``.  Uses the closed alternating binomial sum.
    """
    arr = _raw_array(f)
    if m < 1 or p < 1:
        raise ValueError("need m >= 1 and p >= 1")
    if arr.ndim != 2 * m + p:
        raise ValueError(f"expected rank {2 * m + p}, got {arr.ndim}")
    exact = arr.dtype == object
    sym = _dense.partial_symmetrize(
        _dense.partial_symmetrize(arr, range(m + p)), range(m + p, 2 * m + p)
    )
    scale = max(float(np.max(np.abs(arr.astype(float)))), 1.0) if arr.size else 1.0
    if exact:
        if np.any(sym != arr):
            raise ValueError("input lacks the required partial symmetry")
    elif np.max(np.abs(sym - arr)) > rtol * scale:
        raise ValueError("input lacks the required partial symmetry")

    total = None
    for l in range(m + 1):
        coef = (-1) ** l * _dense.binom(p + l - 1, l) * _dense.binom(m + p, m - l)
        labels = (
            list(range(m - l))
            + list(range(m, m + p))
            + list(range(m + p, 2 * m + p))
            + list(range(m - l, m))
        )
        term = np.transpose(arr, np.argsort(labels)) * (Fraction(coef) if exact else float(coef))
        total = term if total is None else total + term
    u = _dense.partial_symmetrize(
        _dense.partial_symmetrize(total, range(m)), range(m, 2 * m + p)
    )
    return RawTensor.of(u)


__all__ = [
    "MultiIndex",
    "RawTensor",
    "SymTensor",
    "dim_sym",
    "inner",
    "invert_partial_symmetrization",
    "partial_symmetrize",
    "sym_product",
    "symmetrize",
]
