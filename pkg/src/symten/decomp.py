"""Decomposition f = dv + i lambda + f~ of a symmetric field on the unit square.

Flat metric, ranks m in {1, 2}.  v (rank m-1, zero on the boundary) solves
the Dirichlet problem (delta p d) v = delta p f; then
lambda = (ji)^{-1} j (f - dv) and f~ = p f - p d v.

Discretization
--------------
Tensors are stored per node as full (2,)*m arrays.  The discrete inner
derivative is d = sigma(grad (x) v) built from one-sided differences; the
divergence is defined as minus its transpose, so the assembled operator

    A = (D+^T P D+ + D-^T P D-) / 2

(forward and backward variants averaged, P the pointwise projection p) is
symmetric positive semi-definite, and definite on the Dirichlet subspace.
For m = 1 it is exactly the 5-point Dirichlet Laplacian.  Reconstruction of
lambda and f~ uses second-order central differences for dv (one-sided
second-order formulas on the boundary).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import _dense

N_DIM = 2


# --------------------------------------------------------------------------
# grid fields


@dataclass(frozen=True, eq=False)
class GridField:
    """Rank-m symmetric field sampled on the N x N uniform grid of [0, 1]^2.

    ``values`` has shape (N, N) + (2,)*m, indexed [i, j] with x = i h, y = j h.
    """

    rank: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 + self.rank or v.shape[0] != v.shape[1] or v.shape[2:] != (N_DIM,) * self.rank:
            raise ValueError(f"values must have shape (N, N) + (2,)*{self.rank}, got {v.shape}")
        if v.shape[0] < 3:
            raise ValueError("need at least a 3 x 3 grid")
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.shape[0]

    @property
    def h(self) -> float:
        return 1.0 / (self.N - 1)

    @staticmethod
    def coords(N: int) -> tuple[np.ndarray, np.ndarray]:
        t = np.linspace(0.0, 1.0, N)
        return np.meshgrid(t, t, indexing="ij")

    @classmethod
    def from_function(cls, fn: Callable, rank: int, N: int) -> "GridField":
        """``fn(X, Y)`` returns values of shape (N, N) + (2,)*rank."""
        X, Y = cls.coords(N)
        return cls(rank, np.asarray(fn(X, Y), dtype=float))

    @classmethod
    def from_slots(cls, slots: np.ndarray, rank: int) -> "GridField":
        """From sorted-slot components of shape (N, N, dim_sym)."""
        return cls(rank, _dense.from_slots(np.asarray(slots, dtype=float), rank, N_DIM))

    @classmethod
    def zeros(cls, rank: int, N: int) -> "GridField":
        return cls(rank, np.zeros((N, N) + (N_DIM,) * rank))

    def slots(self) -> np.ndarray:
        return _dense.to_slots(self.values, self.rank, N_DIM)

    def boundary_mask(self) -> np.ndarray:
        return boundary_mask(self.N)

    def __add__(self, other: "GridField") -> "GridField":
        return GridField(self.rank, self.values + other.values)

    def __sub__(self, other: "GridField") -> "GridField":
        return GridField(self.rank, self.values - other.values)


def boundary_mask(N: int) -> np.ndarray:
    b = np.zeros((N, N), dtype=bool)
    b[0, :] = b[-1, :] = b[:, 0] = b[:, -1] = True
    return b


def l2_norm(values: np.ndarray, h: float, mask: np.ndarray | None = None) -> float:
    """Discrete L2 norm sqrt(h^2 sum |t|^2) over nodes (optionally masked)."""
    v = np.asarray(values, dtype=float)
    sq = np.sum(v.reshape(v.shape[0], v.shape[1], -1) ** 2, axis=-1)
    if mask is not None:
        sq = sq[mask]
    return float(np.sqrt(h * h * np.sum(sq)))


# --------------------------------------------------------------------------
# pointwise algebra on full arrays


def _eye(n):
    return np.eye(n)


def _matrix_of(op: Callable, r_in: int, r_out: int) -> np.ndarray:
    """Dense matrix of a linear map between full (2,)*r arrays."""
    k_in = N_DIM**r_in
    E = np.eye(k_in).reshape((k_in,) + (N_DIM,) * r_in)
    img = op(E)
    return img.reshape(k_in, N_DIM**r_out).T


def projection_matrix(m: int) -> np.ndarray:
    """p on full rank-m arrays (identity on ranks 0 and 1)."""
    g = _eye(N_DIM)
    return _matrix_of(lambda E: _dense.project_p(_dense.symmetrize(E, m), m, g, g), m, m)


def _sym_matrix(m: int) -> np.ndarray:
    return _matrix_of(lambda E: _dense.symmetrize(E, m), m, m)


# --------------------------------------------------------------------------
# difference operators


def _diff_1d(N: int, h: float, kind: str) -> sp.csr_matrix:
    """1D difference matrix; rows without a full stencil are zero."""
    if kind == "forward":
        main = np.r_[-np.ones(N - 1), 0.0]
        up = np.ones(N - 1)
        return sp.diags([main, up], [0, 1], shape=(N, N), format="csr") / h
    if kind == "backward":
        main = np.r_[0.0, np.ones(N - 1)]
        low = -np.ones(N - 1)
        return sp.diags([main, low], [0, -1], shape=(N, N), format="csr") / h
    if kind == "central":
        D = sp.lil_matrix((N, N))
        for i in range(1, N - 1):
            D[i, i - 1], D[i, i + 1] = -0.5, 0.5
        D[0, :3] = [-1.5, 2.0, -0.5]
        D[N - 1, N - 3:] = [0.5, -2.0, 1.5]
        return D.tocsr() / h
    raise ValueError(kind)


def _partials(N: int, h: float, kind: str) -> list[sp.csr_matrix]:
    D = _diff_1d(N, h, kind)
    I = sp.identity(N, format="csr")
    # node index = i * N + j, with x along i and y along j
    return [sp.kron(D, I, format="csr"), sp.kron(I, D, format="csr")]


def _output_mask(N: int, kind: str) -> np.ndarray:
    """Nodes where a one-sided gradient has both stencils available."""
    ok = np.ones((N, N), dtype=bool)
    if kind == "forward":
        ok[-1, :] = ok[:, -1] = False
    elif kind == "backward":
        ok[0, :] = ok[:, 0] = False
    return ok.reshape(-1)


def grad_matrix(N: int, r: int, kind: str) -> sp.csr_matrix:
    """d = sigma(grad (x) v) from rank r to rank r+1, component-major ordering."""
    h = 1.0 / (N - 1)
    parts = _partials(N, h, kind)
    k_in, k_out = N_DIM**r, N_DIM ** (r + 1)
    blocks = []
    for a in range(N_DIM):
        sel = np.zeros((k_out, k_in))
        for I in range(k_in):
            sel[a * k_in + I, I] = 1.0
        blocks.append(sp.kron(sel, parts[a], format="csr"))
    G = sum(blocks[1:], blocks[0])
    S = sp.kron(_sym_matrix(r + 1), sp.identity(N * N), format="csr")
    mask = _output_mask(N, kind)
    M = sp.kron(sp.identity(k_out), sp.diags(mask.astype(float)), format="csr")
    return (M @ S @ G).tocsr()


def _to_vec(values: np.ndarray, rank: int) -> np.ndarray:
    N = values.shape[0]
    return np.moveaxis(values.reshape(N * N, N_DIM**rank), 1, 0).reshape(-1)


def _from_vec(vec: np.ndarray, rank: int, N: int) -> np.ndarray:
    return np.moveaxis(vec.reshape(N_DIM**rank, N * N), 0, 1).reshape((N, N) + (N_DIM,) * rank)


# --------------------------------------------------------------------------
# boundary value problem


@dataclass(frozen=True, eq=False)
class BVPSystem:
    """Assembled Dirichlet problem A v = b (boundary rows are identity rows)."""

    m: int
    N: int
    A: sp.csr_matrix
    b: np.ndarray
    interior: np.ndarray  # boolean over unknown vector entries

    @property
    def A_interior(self) -> sp.csr_matrix:
        idx = np.flatnonzero(self.interior)
        return self.A[idx][:, idx]


def _check_rank(m: int):
    if m not in (1, 2):
        raise ValueError(f"unsupported rank {m}; supported ranks are 1 and 2")


def assemble_bvp(f: GridField) -> BVPSystem:
    """Discretize (delta p d) v = delta p f with v = 0 on the boundary."""
    m, N = f.rank, f.N
    _check_rank(m)
    r = m - 1
    P = sp.kron(projection_matrix(m), sp.identity(N * N), format="csr")
    fv = _to_vec(f.values, m)
    A = None
    b = None
    for kind in ("forward", "backward"):
        D = grad_matrix(N, r, kind)
        mask = np.tile(_output_mask(N, kind), N_DIM**m).astype(float)
        Ak = D.T @ P @ D
        bk = D.T @ (P @ (mask * fv))
        A = Ak if A is None else A + Ak
        b = bk if b is None else b + bk
    A = 0.5 * A
    b = 0.5 * b
    interior = np.tile(~boundary_mask(N).reshape(-1), N_DIM**r)
    R = sp.diags(interior.astype(float))
    B = sp.diags((~interior).astype(float))
    A = (R @ A @ R + B).tocsr()
    b = np.where(interior, b, 0.0)
    return BVPSystem(m, N, A, b, interior)


# --------------------------------------------------------------------------
# reconstruction helpers


def central_d(values: np.ndarray, rank: int) -> np.ndarray:
    """Nodal d = sigma(grad (x) v), second order everywhere."""
    N = values.shape[0]
    D = grad_matrix(N, rank, "central")
    return _from_vec(D @ _to_vec(values, rank), rank + 1, N)


def central_delta(values: np.ndarray, rank: int) -> np.ndarray:
    """Nodal divergence by second-order central differences."""
    N = values.shape[0]
    h = 1.0 / (N - 1)
    parts = _partials(N, h, "central")
    out = 0.0
    for a in range(N_DIM):
        comp = values[:, :, a, ...] if rank else None
        flat = comp.reshape(N * N, -1)
        out = out + (parts[a] @ flat).reshape((N, N) + (N_DIM,) * (rank - 1))
    return out


@dataclass(frozen=True, eq=False)
class SolveStats:
    iterations: int
    converged: bool
    relative_residual: float
    seconds: float


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """v (rank m-1), lam (rank m-2, None for m = 1), f~ (rank m) and diagnostics."""

    v: GridField
    lam: GridField | None
    f_tilde: GridField
    reconstruct_error: float
    trace_residual: float
    divergence_residual: float
    tol_reconstruct: float
    tol_constraint: float
    stats: SolveStats
    central_divergence: float = float("nan")

    @property
    def ok(self) -> bool:
        return (self.stats.converged
                and self.reconstruct_error <= self.tol_reconstruct
                and self.trace_residual <= self.tol_constraint
                and self.divergence_residual <= self.tol_constraint
                and bool(np.all(self.v.values[boundary_mask(self.v.N)] == 0.0)))

    def as_dict(self) -> dict:
        return {
            "m": self.f_tilde.rank,
            "N": self.f_tilde.N,
            "reconstruct_error": self.reconstruct_error,
            "trace_residual": self.trace_residual,
            "divergence_residual": self.divergence_residual,
            "central_divergence": self.central_divergence,
            "tol_reconstruct": self.tol_reconstruct,
            "tol_constraint": self.tol_constraint,
            "iterations": self.stats.iterations,
            "converged": self.stats.converged,
            "relative_residual": self.stats.relative_residual,
            "ok": self.ok,
        }


class SolveError(RuntimeError):
    """Raised when the linear solver does not converge."""


def solve_bvp(system: BVPSystem, rtol: float = 1e-10, maxiter: int = 10_000):
    A, b = system.A, system.b
    diag = A.diagonal()
    M = sp.diags(1.0 / diag)
    it = [0]

    def count(_):
        it[0] += 1

    t0 = time.perf_counter()
    if not np.any(b):
        x, info = np.zeros_like(b), 0
    else:
        x, info = spla.cg(A, b, rtol=rtol, atol=0.0, maxiter=maxiter, M=M, callback=count)
    bn = np.linalg.norm(b)
    rel = float(np.linalg.norm(A @ x - b) / bn) if bn > 0 else 0.0
    stats = SolveStats(it[0], info == 0, rel, time.perf_counter() - t0)
    x = np.where(system.interior, x, 0.0)
    return x, stats


def decompose_field(f: GridField, tol: float = 1e-8, rtol: float = 1e-10,
                    maxiter: int = 10_000, raise_on_failure: bool = True) -> DecompositionResult:
    """Split f into dv + i lam + f~ (flat unit square, m in {1, 2})."""
    m, N, h = f.rank, f.N, f.h
    _check_rank(m)
    system = assemble_bvp(f)
    x, stats = solve_bvp(system, rtol, maxiter)
    if raise_on_failure and not stats.converged:
        raise SolveError(f"CG did not converge in {maxiter} iterations (residual {stats.relative_residual:.3g})")
    v = GridField(m - 1, _from_vec(x, m - 1, N))
    dv = central_d(v.values, m - 1)
    g = np.eye(N_DIM)
    rest = f.values - dv
    if m >= 2:
        lam_vals = _dense.ji_inverse(_dense.trace(rest, m, g), m - 2, g, g)
        lam = GridField(m - 2, lam_vals)
        i_lam = _dense.mul_metric(lam_vals, m - 2, g)
        ft = _dense.project_p(rest, m, g, g)
        trace_res = l2_norm(_dense.trace(ft, m, g), h)
    else:
        lam = None
        i_lam = 0.0
        ft = rest
        trace_res = 0.0
    f_tilde = GridField(m, ft)
    recon = l2_norm(f.values - dv - i_lam - ft, h)
    inner = ~boundary_mask(N)
    div = l2_norm(scheme_divergence(f, x), h, inner)
    central = l2_norm(central_delta(ft, m), h, inner)
    tol_c = max(10 * h * h, tol)
    return DecompositionResult(v, lam, f_tilde, recon, trace_res, div, tol_c, tol_c, stats, central)


def scheme_divergence(f: GridField, x: np.ndarray) -> np.ndarray:
    """delta_h f~ for the discrete pair f~(+-) = P(f - D(+-) v), delta_h = -d_h^T.

    The nodal f~ is the average of the pair (central differences inside the
    square); this is the divergence the Dirichlet problem sets to zero.
    """
    m, N = f.rank, f.N
    P = sp.kron(projection_matrix(m), sp.identity(N * N), format="csr")
    fv = _to_vec(f.values, m)
    out = 0.0
    for kind in ("forward", "backward"):
        D = grad_matrix(N, m - 1, kind)
        mask = np.tile(_output_mask(N, kind), N_DIM**m).astype(float)
        out = out - 0.5 * (D.T @ (P @ (mask * fv - D @ x)))
    return _from_vec(out, m - 1, N)


def smallest_eigenvalue(system: BVPSystem) -> float:
    """Smallest eigenvalue of the operator on the Dirichlet subspace."""
    A = system.A_interior
    if A.shape[0] <= 200:
        return float(np.linalg.eigvalsh(A.toarray())[0])
    vals = spla.eigsh(A, k=1, sigma=0.0, which="LM", return_eigenvectors=False)
    return float(vals[0])


def green_compatibility(N: int, m: int, rng: np.random.Generator) -> float:
    """|<p d v, w> + <v, delta p w>| / (|v| |w|) for the discrete pair, w interior-supported."""
    _check_rank(m)
    r = m - 1
    inner = np.tile(~boundary_mask(N).reshape(-1), N_DIM**r)
    v = rng.standard_normal(inner.size) * inner
    w_vals = rng.standard_normal((N, N) + (N_DIM,) * m)
    w_vals = _dense.symmetrize(w_vals, m)
    w_vals[boundary_mask(N)] = 0.0
    w = _to_vec(w_vals, m)
    P = sp.kron(projection_matrix(m), sp.identity(N * N), format="csr")
    D = grad_matrix(N, r, "forward")
    delta = -D.T  # discrete divergence
    lhs = float((P @ (D @ v)) @ w)
    rhs = float(v @ (delta @ (P @ w)))
    return abs(lhs + rhs) / max(np.linalg.norm(v) * np.linalg.norm(w), 1e-300)


# --------------------------------------------------------------------------
# manufactured data and stability


def manufactured_pieces(m: int = 2):
    """Callables (v0, grad_v0, lam0, ft0) of (X, Y) for a known decomposition.

    v0 vanishes on the boundary; ft0 comes from the holomorphic function
    z^2 / 2 and satisfies j ft0 = 0, delta ft0 = 0.
    """
    _check_rank(m)
    pi = np.pi

    def v0(X, Y):
        s = np.sin(pi * X) * np.sin(pi * Y)
        if m == 1:
            return 0.5 * s
        return np.stack([0.5 * s, 0.25 * np.sin(2 * pi * X) * np.sin(pi * Y)], axis=-1)

    def grad_v0(X, Y):
        """Array [..., a, I] = d_a v0_I."""
        sx, cx = np.sin(pi * X), np.cos(pi * X)
        sy, cy = np.sin(pi * Y), np.cos(pi * Y)
        g1 = np.stack([0.5 * pi * cx * sy, 0.5 * pi * sx * cy], axis=-1)
        if m == 1:
            return g1
        s2, c2 = np.sin(2 * pi * X), np.cos(2 * pi * X)
        g2 = np.stack([0.5 * pi * c2 * sy, 0.25 * pi * s2 * cy], axis=-1)
        return np.stack([g1, g2], axis=-1)

    def lam0(X, Y):
        return np.cos(X) * (1 + 0.5 * Y)

    def ft0(X, Y):
        # w = z^2 / 2:  a = Re w, b = -Im w
        a = 0.5 * (X**2 - Y**2)
        b = -X * Y
        if m == 1:
            # divergence-free covector from a stream function
            return np.stack([np.cos(pi * X) * np.sin(pi * Y), -np.sin(pi * X) * np.cos(pi * Y)], axis=-1) * 0.2
        out = np.empty(X.shape + (2, 2))
        out[..., 0, 0], out[..., 1, 1] = a, -a
        out[..., 0, 1] = out[..., 1, 0] = b
        return out

    return v0, grad_v0, lam0, ft0


def manufactured_field(N: int, m: int = 2):
    """f = d v0 + i lam0 + ft0 on an N x N grid, with the pieces as grid fields."""
    v0, grad_v0, lam0, ft0 = manufactured_pieces(m)
    X, Y = GridField.coords(N)
    g = np.eye(N_DIM)
    dv = _dense.symmetrize(grad_v0(X, Y), m)
    parts_v = GridField(m - 1, v0(X, Y))
    ft = GridField(m, ft0(X, Y))
    f = dv + ft0(X, Y)
    lam = None
    if m == 2:
        lam_vals = lam0(X, Y)
        lam = GridField(0, lam_vals)
        f = f + _dense.mul_metric(lam_vals, 0, g)
    return GridField(m, f), parts_v, lam, ft


@dataclass(frozen=True)
class RefinementRow:
    N: int
    h: float
    f_norm: float
    v_ratio: float
    lam_ratio: float
    ft_ratio: float
    v_error: float | None = None
    lam_error: float | None = None
    ft_error: float | None = None


@dataclass(frozen=True)
class StabilityReport:
    rows: tuple[RefinementRow, ...]
    spread: float
    bounded: bool
    orders: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"rows": [r.__dict__ for r in self.rows], "spread": self.spread,
                "bounded": self.bounded, "orders": self.orders}


def _ratio(a: float, b: float) -> float:
    return a / b if b > 0 else 0.0


def _order(errors: list[float], hs: list[float]) -> float | None:
    e = np.asarray(errors, dtype=float)
    if np.any(e <= 0):
        return None
    slope = np.polyfit(np.log(hs), np.log(e), 1)[0]
    return float(slope)


def stability_report(results: list[tuple[GridField, DecompositionResult]],
                     truth: list[tuple] | None = None, band: float = 0.2) -> StabilityReport:
    """Ratios |v|/|f|, |lam|/|f|, |f~|/|f| over refinements.

    ``truth`` optionally holds (v0, lam0, ft0) grid fields per level; then the
    discrete L2 errors and observed convergence orders are reported too.
    """
    if len(results) < 3:
        raise ValueError("need at least three refinement levels")
    rows = []
    for k, (f, res) in enumerate(results):
        h = f.h
        fn = l2_norm(f.values, h)
        vn = l2_norm(res.v.values, h)
        ln = l2_norm(res.lam.values, h) if res.lam is not None else 0.0
        tn = l2_norm(res.f_tilde.values, h)
        errs = (None, None, None)
        if truth is not None:
            v0, l0, t0 = truth[k]
            errs = (l2_norm(res.v.values - v0.values, h),
                    l2_norm(res.lam.values - l0.values, h) if l0 is not None else 0.0,
                    l2_norm(res.f_tilde.values - t0.values, h))
        rows.append(RefinementRow(f.N, h, fn, _ratio(vn, fn), _ratio(ln, fn), _ratio(tn, fn), *errs))
    spread = 0.0
    for attr in ("v_ratio", "lam_ratio", "ft_ratio"):
        vals = np.array([getattr(r, attr) for r in rows])
        if np.max(vals) > 0:
            spread = max(spread, float((np.max(vals) - np.min(vals)) / np.max(vals)))
    finite = all(np.isfinite([r.v_ratio, r.lam_ratio, r.ft_ratio]).all() for r in rows)
    orders = {}
    if truth is not None:
        hs = [r.h for r in rows]
        for attr in ("v_error", "lam_error", "ft_error"):
            errs = [getattr(r, attr) for r in rows]
            orders[attr.replace("_error", "")] = _order(errs, hs)
    return StabilityReport(tuple(rows), spread, finite and spread <= band, orders)


def refinement_study(m: int = 2, meshes=(17, 33, 65), tol: float = 1e-8) -> StabilityReport:
    """Manufactured decomposition solved on each mesh, with errors and orders."""
    results, truth = [], []
    for N in meshes:
        f, v0, lam0, ft0 = manufactured_field(N, m)
        results.append((f, decompose_field(f, tol)))
        truth.append((v0, lam0, ft0))
    return stability_report(results, truth)


__all__ = [
    "BVPSystem",
    "DecompositionResult",
    "GridField",
    "RefinementRow",
    "SolveError",
    "StabilityReport",
    "assemble_bvp",
    "central_d",
    "central_delta",
    "decompose_field",
    "green_compatibility",
    "l2_norm",
    "manufactured_field",
    "manufactured_pieces",
    "projection_matrix",
    "refinement_study",
    "smallest_eigenvalue",
    "solve_bvp",
    "stability_report",
]
