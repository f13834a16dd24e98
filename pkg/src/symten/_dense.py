"""Backend-agnostic kernels on full (n,)*m component arrays.

Every function here takes arrays whose *last* ``m`` axes carry the tensor
indices; any leading axes are batch axes and are broadcast.  The same code
runs on float numpy arrays, object arrays of :class:`fractions.Fraction`
(exact arithmetic) and jax arrays (so it can be traced and differentiated).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

import numpy as np
import scipy.sparse as sp


def xp_of(*arrays):
    """Return the array namespace (numpy or jax.numpy) for ``arrays``."""
    for a in arrays:
        if type(a).__module__.startswith("jax"):
            import jax.numpy as jnp

            return jnp
    return np


def is_exact(a) -> bool:
    if isinstance(a, Fraction):
        return True
    return isinstance(a, np.ndarray) and a.dtype == object


def cast(c: Fraction, like):
    """Cast an exact coefficient to the scalar type used by ``like``."""
    return c if is_exact(like) else float(c)


def tshape(a, m: int) -> tuple[tuple[int, ...], int]:
    """Split the shape of ``a`` into (batch shape, n)."""
    shape = np.shape(a)
    if m == 0:
        return tuple(shape), 0
    return tuple(shape[:-m]), shape[-1]


@lru_cache(maxsize=None)
def sorted_indices(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """Sorted multi-indices (0-based) in lexicographic order."""
    return tuple(itertools.combinations_with_replacement(range(n), m))


@lru_cache(maxsize=None)
def slot_map(n: int, m: int):
    """Index bookkeeping between full arrays and sorted-slot storage.

    Returns
    -------
    flat_to_slot : ndarray of int, shape (n**m,)
    reps : ndarray of int, shape (S,)
        Flat position of each sorted multi-index.
    counts : ndarray of int, shape (S,)
        Multiplicity m!/prod(count!) of each slot.
    """
    idx = sorted_indices(n, m)
    lookup = {t: s for s, t in enumerate(idx)}
    flat_to_slot = np.empty(n**m, dtype=np.int64)
    for f, t in enumerate(itertools.product(range(n), repeat=m)):
        flat_to_slot[f] = lookup[tuple(sorted(t))]
    reps = np.array(
        [np.ravel_multi_index(t, (n,) * m) if m else 0 for t in idx], dtype=np.int64
    )
    counts = np.bincount(flat_to_slot, minlength=len(idx))
    return flat_to_slot, reps, counts


@lru_cache(maxsize=None)
def _avg_matrix(n: int, m: int):
    flat_to_slot, _, counts = slot_map(n, m)
    N = flat_to_slot.size
    data = 1.0 / counts[flat_to_slot]
    return sp.csr_matrix((data, (flat_to_slot, np.arange(N))), shape=(counts.size, N))


def multiplicity(n: int, m: int) -> np.ndarray:
    return slot_map(n, m)[2]


def multinomial(counts) -> int:
    out = factorial(sum(counts))
    for c in counts:
        out //= factorial(c)
    return out


def _slot_means(flat, n: int, m: int):
    """Mean of ``flat[..., f]`` over all ``f`` mapping to each sorted slot."""
    flat_to_slot, _, counts = slot_map(n, m)
    batch = flat.shape[:-1]
    N = flat.shape[-1]
    xp = xp_of(flat)
    if xp is not np:
        import jax

        sums = jax.ops.segment_sum(flat.reshape(-1, N).T, flat_to_slot, counts.size)
        return (sums / counts[:, None]).T.reshape(batch + (counts.size,))
    if flat.dtype == object:
        out = np.empty((counts.size, int(np.prod(batch, dtype=int))), dtype=object)
        out[...] = Fraction(0)
        np.add.at(out, flat_to_slot, flat.reshape(-1, N).T)
        out = out / counts[:, None].astype(object)
        return out.T.reshape(batch + (counts.size,))
    res = _avg_matrix(n, m) @ flat.reshape(-1, N).T
    return np.asarray(res).T.reshape(batch + (counts.size,))


def to_slots(a, m: int, n: int | None = None):
    """Sorted-slot components of an (assumed symmetric) full array."""
    batch, n_ = tshape(a, m)
    n = n if n is not None else n_
    _, reps, _ = slot_map(n, m)
    return a.reshape(batch + (n**m,))[..., reps]


def from_slots(c, m: int, n: int):
    """Full symmetric array from sorted-slot components (last axis)."""
    flat_to_slot, _, _ = slot_map(n, m)
    return c[..., flat_to_slot].reshape(c.shape[:-1] + (n,) * m)


def symmetrize(a, m: int):
    """Full symmetrization over the last ``m`` axes."""
    if m <= 1:
        return a
    batch, n = tshape(a, m)
    means = _slot_means(a.reshape(batch + (n**m,)), n, m)
    return from_slots(means, m, n)


def partial_symmetrize(a, axes):
    """Average over all permutations of the given axes (absolute positions)."""
    axes = list(axes)
    if len(axes) <= 1:
        return a
    xp = xp_of(a)
    total = None
    for perm in itertools.permutations(axes):
        order = list(range(a.ndim))
        for src, dst in zip(axes, perm):
            order[src] = dst
        t = xp.transpose(a, order)
        total = t if total is None else total + t
    return total / cast(Fraction(factorial(len(axes))), a)


def outer(a, ma: int, b, mb: int):
    """Tensor product with batch broadcasting; result rank ma+mb."""
    ba, n1 = tshape(a, ma)
    bb, n2 = tshape(b, mb)
    n = n1 or n2
    xp = xp_of(a, b)
    ta = (n,) * ma
    tb = (n,) * mb
    return xp.reshape(a, ba + ta + (1,) * mb) * xp.reshape(b, bb + (1,) * ma + tb)


def sym_product(a, ma: int, b, mb: int):
    return symmetrize(outer(a, ma, b, mb), ma + mb)


def mul_metric(a, m: int, g, times: int = 1):
    """The operator i applied ``times`` times: u -> sigma(g (x) u)."""
    for k in range(times):
        a = sym_product(g, 2, a, m + 2 * k)
    return a


def contract_first(a, m: int, vec_up):
    """Contract the first tensor axis of ``a`` with a vector."""
    xp = xp_of(a, vec_up)
    batch, n = tshape(a, m)
    t = a.reshape(batch + (n, n ** (m - 1)))
    r = xp.einsum("...i,...ir->...r", vec_up, t)
    return r.reshape(r.shape[:-1] + (n,) * (m - 1))


def trace(a, m: int, ginv, times: int = 1):
    """The operator j applied ``times`` times (contraction with g^{-1})."""
    xp = xp_of(a, ginv)
    for _ in range(times):
        if m < 2:
            raise ValueError("trace needs rank >= 2")
        batch, n = tshape(a, m)
        t = a.reshape(batch + (n, n, n ** (m - 2)))
        r = xp.einsum("...ij,...ijr->...r", ginv, t)
        a = r.reshape(r.shape[:-1] + (n,) * (m - 2))
        m -= 2
    return a


def raise_all(a, m: int, ginv):
    """Raise every index with g^{-1}."""
    xp = xp_of(a, ginv)
    for _ in range(m):
        batch, n = tshape(a, m)
        t = a.reshape(batch + (n, n ** (m - 1)))
        r = xp.einsum("...ij,...jr->...ri", ginv, t)
        a = r.reshape(r.shape[:-2] + (n,) * m)
    return a


def inner(a, b, m: int, ginv):
    """Pointwise inner product sum u_I v^I (batch scalar)."""
    xp = xp_of(a, b, ginv)
    prod = a * raise_all(b, m, ginv)
    if m == 0:
        return prod
    return xp.sum(prod.reshape(prod.shape[:-m] + (-1,)), axis=-1)


def _A(n: int, r: int, t: int) -> Fraction:
    """Eigen-coefficient: j i^t w = A i^{t-1} w for trace-free w of rank r."""
    return Fraction(2 * t * (n + 2 * r + 2 * t - 2), (r + 2 * t - 1) * (r + 2 * t))


def ji_eigenvalue(n: int, m: int, k: int) -> Fraction:
    """Eigenvalue of ji on i^k Ker j inside rank-m tensors."""
    return Fraction(2 * (k + 1) * (n + 2 * m - 2 * k), (m + 1) * (m + 2))


def harmonic_parts(a, m: int, g, ginv):
    """Trace-free parts w_k (rank m-2k) with a = sum_k i^k w_k.

    Uses back-substitution on the chain j^k a instead of inverting ji.
    """
    n = g.shape[-1]
    K = m // 2
    J = [a]
    for k in range(1, K + 1):
        J.append(trace(J[-1], m - 2 * k + 2, ginv))
    w = [None] * (K + 1)
    for k in range(K, -1, -1):
        acc = J[k]
        for l in range(k + 1, K + 1):
            r = m - 2 * l
            c = Fraction(1)
            for s in range(k):
                c *= _A(n, r, l - s)
            acc = acc - cast(c, a) * mul_metric(w[l], r, g, l - k)
        ckk = Fraction(1)
        for s in range(k):
            ckk *= _A(n, m - 2 * k, k - s)
        w[k] = acc * cast(1 / ckk, a) if k else acc
    return w


def project_p(a, m: int, g, ginv):
    if m < 2:
        return a
    return harmonic_parts(a, m, g, ginv)[0]


def project_q(a, m: int, g, ginv):
    return a - project_p(a, m, g, ginv)


def ji_inverse(a, m: int, g, ginv):
    """(ji)^{-1} on rank-m tensors, via the harmonic parts."""
    n = g.shape[-1]
    w = harmonic_parts(a, m, g, ginv)
    out = None
    for k, wk in enumerate(w):
        term = mul_metric(wk, m - 2 * k, g, k) * cast(1 / ji_eigenvalue(n, m, k), a)
        out = term if out is None else out + term
    return out


def binom(i: int, j: int) -> int:
    """Binomial coefficient, zero when j < 0 or j > i."""
    if j < 0 or i < 0 or j > i:
        return 0
    return comb(i, j)
