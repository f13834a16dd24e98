"""Invariant suites: each returns a list of named checks with residuals.

Suites are the shared engine of the ``verify`` command and the acceptance
tests.  A check records the largest residual seen over all random cases and
the tolerance it is held to.  Exact checks report a count of failures (or
an exact rational residual converted to float) against tolerance 0.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import factorial, gamma, pi
from typing import Callable

import numpy as np

from . import boundary_coeffs as bc
from .metric_ops import (
    MetricPoint,
    harmonic_decompose,
    i_xi,
    inner,
    j_xi,
    ji_apply,
    ji_commutation_rhs,
    ji_eigenvalue,
    ji_inverse,
    mul_metric,
    project_p,
    trace,
)
from .sphere import kappa_eval, sphere_quadrature, trace_free_basis, vertical_laplacian
from .symcore import SymTensor

TINY = 1e-300


@dataclass(frozen=True)
class Check:
    """One verified identity: largest residual over all cases and its tolerance."""

    name: str
    paper_anchor: str
    residual: float
    tol: float
    cases: int = 1

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual)) and self.residual <= self.tol

    def as_dict(self) -> dict:
        return {"name": self.name, "paper_anchor": self.paper_anchor,
                "residual": float(self.residual), "tol": self.tol, "cases": self.cases,
                "pass": self.passed}


@dataclass(frozen=True)
class SuiteResult:
    suite: str
    checks: tuple[Check, ...]
    seconds: float
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


class _Collector:
    """Keeps the running maximum residual per check name."""

    def __init__(self):
        self._items: dict[str, list] = {}

    def add(self, name: str, anchor: str, residual: float, tol: float):
        residual = float(residual)
        item = self._items.get(name)
        if item is None:
            self._items[name] = [anchor, residual, tol, 1]
        else:
            item[1] = max(item[1], residual) if np.isfinite(residual) else float("nan")
            item[3] += 1

    def checks(self) -> list[Check]:
        return [Check(k, a, r, t, c) for k, (a, r, t, c) in self._items.items()]


def _rel(a: SymTensor, b: SymTensor, *refs: SymTensor) -> float:
    err = (a - b).max_abs()
    scale = max([a.max_abs(), b.max_abs()] + [r.max_abs() for r in refs] + [TINY])
    return err / scale


def _rel_arrays(a, b, *refs) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    err = float(np.max(np.abs(a - b))) if a.size else 0.0
    scale = max([float(np.max(np.abs(x))) if np.size(x) else 0.0 for x in (a, b) + refs] + [TINY])
    return err / scale


# --------------------------------------------------------------------------
# 1. pointwise algebra


def _unit_vectors(rng, g: MetricPoint, count: int) -> np.ndarray:
    x = rng.standard_normal((count, g.dim))
    norms = np.sqrt(np.einsum("pi,ij,pj->p", x, g.g, x))
    return x / norms[:, None]


def algebra_suite(seed: int = 0, cases: int = 200, dims=(2, 3, 4), m_max: int = 5,
                  tol: float = 1e-10) -> list[Check]:
    """Metric algebra identities on random metrics and tensors."""
    rng = np.random.default_rng(seed)
    out = _Collector()
    combos = [(n, m) for n in dims for m in range(m_max + 1)]
    for case in range(cases):
        n, m = combos[case % len(combos)]
        g = MetricPoint.random(rng, n)
        u = SymTensor.random(rng, n, m)
        xi = rng.standard_normal(n)

        # j i = 2(n+2m)/((m+1)(m+2)) E + m(m-1)/((m+1)(m+2)) i j
        den = (m + 1) * (m + 2)
        rhs = u * (2 * (n + 2 * m) / den)
        if m >= 2:
            rhs = rhs + mul_metric(trace(u, g), g) * (m * (m - 1) / den)
        out.add("ji_commutation", "commutator of trace with metric product",
                _rel(trace(mul_metric(u, g), g), rhs, u), tol)

        for k in (1, 2, 3):
            lhs = ji_apply(u, g, k)
            out.add(f"ji_power_commutation_k{k}", "trace of a power of the metric product",
                    _rel(lhs, ji_commutation_rhs(u, g, k)), tol)

        # lambda(i u) = lambda(u) on the unit sphere bundle
        xs = _unit_vectors(rng, g, 12)
        out.add("lambda_kills_metric_factor", "restriction to unit sphere ignores metric factor",
                _rel_arrays(kappa_eval(mul_metric(u, g), xs), kappa_eval(u, xs)), tol)

        # vertical Laplacian of kappa(u) = m(m-1) kappa(ju)
        xv = rng.standard_normal((12, n))
        lhs = vertical_laplacian(u, g, xv)
        rhs = m * (m - 1) * kappa_eval(trace(u, g), xv).astype(float) if m >= 2 else np.zeros(12)
        ref = np.abs(kappa_eval(u, xv)).max() * max(m * m, 1) * np.abs(g.g_inv).max()
        out.add("vertical_laplacian_trace", "vertical Laplacian versus trace",
                _rel_arrays(lhs, rhs, ref), tol)

        # harmonic decomposition: reconstruction, trace-free parts, eigenvalues of ji
        parts = harmonic_decompose(u, g)
        out.add("harmonic_reconstruction", "harmonic decomposition of symmetric tensors",
                _rel(parts.reconstruct(g), u), tol)
        tf = max([trace(w, g).max_abs() for w in parts.parts if w.rank >= 2] + [0.0])
        out.add("harmonic_parts_trace_free", "harmonic decomposition of symmetric tensors",
                tf / max(u.max_abs(), TINY), tol)
        for k, w in enumerate(parts.parts):
            x = mul_metric(w, g, k) if k else w
            lam = float(ji_eigenvalue(n, m, k))
            out.add("ji_eigenvalues", "eigenvalues of ji on the harmonic summands",
                    _rel(ji_apply(x, g, 1), x * lam), tol)
        out.add("ji_inverse", "inverse of ji", _rel(ji_apply(ji_inverse(u, g), g, 1), u), tol)

        # adjointness <iu, v> = <u, jv>
        v = SymTensor.random(rng, n, m + 2)
        a, b = inner(mul_metric(u, g), v, g), inner(u, trace(v, g), g)
        scale = max(np.sqrt(abs(inner(mul_metric(u, g), mul_metric(u, g), g)) * abs(inner(v, v, g))), TINY)
        out.add("i_j_adjoint", "i and j are mutually adjoint", abs(a - b) / scale, tol)

        if m >= 1:
            # j i_xi = 2/(m+1) j_xi + (m-1)/(m+1) i_xi j
            rhs = j_xi(u, xi, g) * (2 / (m + 1))
            if m >= 2:
                rhs = rhs + i_xi(trace(u, g), xi) * ((m - 1) / (m + 1))
            out.add("trace_of_covector_product", "trace after multiplication by a covector",
                    _rel(trace(i_xi(u, xi), g), rhs, j_xi(u, xi, g)), tol)

            # j_xi i_xi = |xi|^2/(m+1) E + m/(m+1) i_xi j_xi
            rhs = u * (g.norm2(xi) / (m + 1)) + i_xi(j_xi(u, xi, g), xi) * (m / (m + 1))
            out.add("covector_contraction_commutation", "contraction by xi after multiplication by xi",
                    _rel(j_xi(i_xi(u, xi), xi, g), rhs, u * g.norm2(xi)), tol)

            # p i_xi = i_xi p - 2/(m+1) i (ji)^{-1} j_xi p
            pu = project_p(u, g)
            w = ji_inverse(j_xi(pu, xi, g), g)
            rhs = i_xi(pu, xi) - mul_metric(w, g) * (2 / (m + 1))
            out.add("projection_covector_commutation", "trace-free projection of a covector product",
                    _rel(project_p(i_xi(u, xi), g), rhs, i_xi(pu, xi)), tol)
        else:
            out.add("covector_contraction_commutation", "contraction by xi after multiplication by xi",
                    _rel(j_xi(i_xi(u, xi), xi, g), u * g.norm2(xi)), tol)
    return out.checks()


# --------------------------------------------------------------------------
# 2. sphere norm constant


def norm_constant_formula(n: int, m: int) -> float:
    return factorial(m) * pi ** (n / 2) / (2 ** (m - 1) * gamma(n / 2 + m))


def norm_constant_suite(seed: int = 0, dims=(2, 3), m_max: int = 4, tol: float = 1e-9,
                        pairs: int = 3) -> list[Check]:
    """<lambda u, lambda v> over the unit sphere divided by <u, v> for trace-free u, v."""
    rng = np.random.default_rng(seed)
    out = _Collector()
    for n in dims:
        for m in range(m_max + 1):
            for g in (MetricPoint.euclidean(n), MetricPoint.random(rng, n)):
                B = trace_free_basis(n, m, g)
                expect = norm_constant_formula(n, m)
                for _ in range(pairs):
                    u = SymTensor(n, m, rng.standard_normal(B.shape[0]) @ B)
                    v = u + SymTensor(n, m, 0.5 * rng.standard_normal(B.shape[0]) @ B)
                    num = sphere_quadrature(n, lambda x: kappa_eval(u, x) * kappa_eval(v, x), 2 * m + 2, g)
                    ratio = num / float(inner(u, v, g))
                    out.add(f"sphere_norm_constant_n{n}", "norm of lambda on trace-free tensors",
                            abs(ratio - expect) / expect, tol)
    return out.checks()


# --------------------------------------------------------------------------
# 3. differential identities on conformal metrics


DIFFERENTIAL_ANCHORS = {
    "pdp_eq_pd": "projections and the inner derivative",
    "qdq_eq_dq": "projections and the inner derivative",
    "pdq_zero": "projections and the inner derivative",
    "pdeltap_eq_deltap": "projections and the divergence",
    "qdeltaq_eq_qdelta": "projections and the divergence",
    "qdeltap_zero": "projections and the divergence",
    "divergence_of_metric_product": "divergence of i u",
    "trace_of_inner_derivative": "trace of d u",
    "d_q_commutation": "commuting d with q",
    "d_p_commutation": "commuting d with p",
    "q_delta_commutation": "commuting q with the divergence",
    "p_delta_commutation": "commuting p with the divergence",
    "divergence_of_inner_derivative": "delta d in terms of d delta, Laplacian and curvature",
}


def differential_identities(u, m: int):
    """{name: (lhs, rhs or None for zero, reference fields)} for a rank-m field u.

    Shared subexpressions are built once so callers can evaluate each
    distinct field a single time.
    """
    from .geom import curvature_op, d_op, delta_op, i_op, j_op, laplace_op, p_op, q_op

    d, de, p, q, i, j = d_op, delta_op, p_op, q_op, i_op, j_op
    n = u.dim
    pu, qu = p(u), q(u)
    du, dpu, dqu = d(u), d(pu), d(qu)
    pdu = p(du)
    out = {
        "pdp_eq_pd": (p(dpu), pdu, [du]),
        "qdq_eq_dq": (q(dqu), dqu, [du]),
        "pdq_zero": (p(dqu), None, [dqu]),
    }
    rhs = du * (2 / (m + 2))
    if m >= 1:
        rhs = rhs + i(de(u)) * (m / (m + 2))
    out["divergence_of_metric_product"] = (de(i(u)), rhs, [du])
    if m == 0:
        lap = laplace_op(u)
        out["divergence_of_inner_derivative"] = (de(du), lap, [lap])
        return out
    deu, depu, dequ = de(u), de(pu), de(qu)
    qdeu = q(deu)
    out["pdeltap_eq_deltap"] = (p(depu), depu, [deu])
    out["qdeltaq_eq_qdelta"] = (q(dequ), qdeu, [deu])
    out["qdeltap_zero"] = (q(depu), None, [depu])
    rhs = deu * (2 / (m + 1))
    if m >= 2:
        rhs = rhs + d(j(u)) * ((m - 1) / (m + 1))
    out["trace_of_inner_derivative"] = (j(du), rhs, [du])
    c = m / (n + 2 * m - 2)
    ideltap = i(depu) * c
    out["d_q_commutation"] = (dqu, q(du) - ideltap, [du])
    out["d_p_commutation"] = (dpu, pdu + ideltap, [du])
    if m >= 2:
        pdj = p(d(j(u))) * ((m - 1) / (n + 2 * m - 4))
        out["q_delta_commutation"] = (qdeu, dequ - pdj, [deu])
        out["p_delta_commutation"] = (p(deu), depu + pdj, [deu])
    else:
        out["q_delta_commutation"] = (qdeu, dequ, [deu])
        out["p_delta_commutation"] = (p(deu), depu, [deu])
    lap = laplace_op(u)
    ddeu = d(deu)
    rhs = (ddeu * m + lap - curvature_op(u)) * (1 / (m + 1))
    out["divergence_of_inner_derivative"] = (de(du), rhs, [ddeu, lap])
    return out


# conformal factor mu = a x + b (x^2 + y^2)/2 covers exp(2x) (a=1) and exp(x^2+y^2) (b=1)
DIFFERENTIAL_METRICS = {"euclidean": (0.0, 0.0), "exp(2x)": (1.0, 0.0), "exp(x^2+y^2)": (0.0, 1.0)}

_DIFF_CACHE: dict = {}


def _differential_kernel(m: int, degree: int):
    """Jitted residuals for one rank; metric parameters and coefficients are traced."""
    key = (m, degree)
    if key in _DIFF_CACHE:
        return _DIFF_CACHE[key]
    import jax
    import jax.numpy as jnp

    from .geom import _monomial_exponents, conformal_chart, poly_field

    exps = _monomial_exponents(2, degree)

    def residuals(ab, C, X):
        chart = conformal_chart(lambda x: ab[0] * x[0] + ab[1] * 0.5 * (x[0] ** 2 + x[1] ** 2), 2)
        u = poly_field(chart, m, exps, C)
        res, cache = {}, {}

        def ev(f):
            if id(f) not in cache:
                cache[id(f)] = (f, jax.vmap(f.fn)(X))
            return cache[id(f)][1]

        for name, (lhs, rhs, refs) in differential_identities(u, m).items():
            A = ev(lhs)
            B = ev(rhs) if rhs is not None else jnp.zeros_like(A)
            scale = jnp.maximum(jnp.max(jnp.abs(A)), jnp.max(jnp.abs(B)))
            for r in refs:
                scale = jnp.maximum(scale, jnp.max(jnp.abs(ev(r))))
            err = jnp.max(jnp.abs(A - B))
            res[name] = jnp.where(scale > 0, err / jnp.where(scale > 0, scale, 1.0), err)
        return res

    fn = jax.jit(residuals, compiler_options={"xla_backend_optimization_level": 0})
    _DIFF_CACHE[key] = (fn, exps.shape[0])
    return _DIFF_CACHE[key]


def differential_suite(seed: int = 0, m_max: int = 3, degree: int = 3, points: int = 6,
                       tol: float = 1e-8, green: bool = True, metrics=None) -> list[Check]:
    """Differential identities on conformal metrics, plus Green's formula on the flat square."""
    import jax.numpy as jnp

    from .geom import euclidean_chart, greens_residual, random_poly_field

    rng = np.random.default_rng(seed)
    metrics = DIFFERENTIAL_METRICS if metrics is None else metrics
    out = _Collector()
    for m in range(m_max + 1):
        fn, nmono = _differential_kernel(m, degree)
        S = m + 1
        for label, ab in metrics.items():
            X = jnp.asarray(rng.uniform(-0.9, 0.9, (points, 2)))
            C = jnp.asarray(rng.standard_normal((nmono, S)))
            res = fn(jnp.asarray(ab, dtype=jnp.float64), C, X)
            for name, r in res.items():
                out.add(name, DIFFERENTIAL_ANCHORS[name], float(r), tol)
    if green:
        chart = euclidean_chart(2)
        for m in range(1, m_max + 1):
            u = random_poly_field(chart, m - 1, degree, rng)
            v = random_poly_field(chart, m, degree, rng)
            out.add("green_formula_flat_square", "Green formula for d and delta",
                    greens_residual(u, v), tol)
    return out.checks()


# --------------------------------------------------------------------------
# 4. flat commutators


def flat_exact_suite(seed: int = 0, dims=(2, 3), m_max: int = 3, k_max: int = 3, degree: int = 5,
                     exact: bool = True, tol: float = 1e-8) -> list[Check]:
    """delta^l d^k and j d^k on flat space, exact polynomial fields."""
    from .poly import PolyTensorField, delta_d_power_rhs, j_d_power_rhs

    rng = np.random.default_rng(seed)
    out = _Collector()
    for n in dims:
        for m in range(m_max + 1):
            u = PolyTensorField.random(rng, n, m, degree, exact=exact)
            dk = [u]
            for _ in range(k_max):
                dk.append(dk[-1].d())
            for k in range(k_max + 1):
                lhs = dk[k]
                for l in range(0, k_max + 1):
                    if l > m + k:
                        break
                    if l:
                        lhs = lhs.delta()
                    rhs = delta_d_power_rhs(u, k, l)
                    diff = lhs - rhs if rhs is not None else lhs
                    scale = max(lhs.max_abs(), rhs.max_abs() if rhs is not None else 0.0, TINY)
                    out.add("divergence_powers_of_inner_derivative", "delta^l d^k on flat space",
                            diff.max_abs() / scale, tol)
                if m + k >= 2:
                    lhs = dk[k].j()
                    rhs = j_d_power_rhs(u, k)
                    scale = max(lhs.max_abs(), rhs.max_abs(), TINY)
                    out.add("trace_of_inner_derivative_powers", "j d^k on flat space",
                            (lhs - rhs).max_abs() / scale, tol)
    return out.checks()


# --------------------------------------------------------------------------
# 5-7. conformal Killing kernels

CK_EXPECTED = {(3, 1): 10, (4, 1): 15, (3, 2): 35}


def ck_dimension_suite(cases=None) -> list[Check]:
    from .ckt import ck_dimension_bound, poly_ck_kernel

    out = []
    for (n, m), expect in (CK_EXPECTED if cases is None else cases).items():
        dim = poly_ck_kernel(n, m, 2 * m + 2).dimension
        bound = ck_dimension_bound(n, m)
        out.append(Check(f"ck_dimension_n{n}_m{m}", "dimension bound is attained on flat space",
                         abs(dim - expect) + abs(dim - bound), 0.0))
    return out


def constrained_suite() -> list[Check]:
    from .ckt import constrained_ck_kernel

    out = []
    for n, m in ((2, 1), (2, 2), (3, 1), (3, 2)):
        dim = constrained_ck_kernel(n, m, 2 * m + 2, "hyperplane").dimension
        out.append(Check(f"hyperplane_vanishing_n{n}_m{m}", "vanishing on a hypersurface forces zero",
                         float(dim), 0.0))
    dim = constrained_ck_kernel(3, 2, 6, "line").dimension
    out.append(Check("line_vanishing_n3_m2", "vanishing on a line leaves ten dimensions",
                     abs(dim - 10), 0.0))
    return out


def jet_suite(n: int = 3, m_max: int = 2) -> list[Check]:
    from .ckt import constrained_ck_kernel

    out = []
    for m in range(1, m_max + 1):
        dim = constrained_ck_kernel(n, m, 2 * m + 2, "jet", order=2 * m).dimension
        out.append(Check(f"jet_order_2m_kills_kernel_m{m}", "finite jet determines the tensor",
                         float(dim), 0.0))
        dim = constrained_ck_kernel(n, m, 2 * m + 2, "jet", order=2 * m - 1).dimension
        out.append(Check(f"jet_order_2m_minus_1_leaves_kernel_m{m}", "finite jet determines the tensor",
                         float(dim == 0), 0.0))
    return out


# --------------------------------------------------------------------------
# 8. exact coefficient combinatorics


def coeffs_suite(seed: int = 0, n_max: int = 8, m_max: int = 8, support_m_max: int = 6,
                 tensor_n_max: int = 4, tensor_m_max: int = 3) -> list[Check]:
    """Exact rational checks; residuals count failing cases."""
    rng = np.random.default_rng(seed)
    out = _Collector()
    ns = range(2, n_max + 1)
    ms = range(1, m_max + 1)
    for n in ns:
        for m in ms:
            out.add("closed_forms_match_recurrences", "closed forms of the boundary coefficients",
                    0 if bc.verify_closed_forms(n, m) else 1, 0.0)
            out.add("a_three_term_relation", "three-term relation for a(s,k)",
                    0 if bc.verify_a_relation(n, m) else 1, 0.0)
            out.add("b_three_term_relation", "three-term relation for b(s,k)",
                    0 if bc.verify_b_relation(n, m) else 1, 0.0)
            out.add("trace_free_chain_polynomial_model", "normal derivatives form a trace-free chain",
                    len(bc.trace_chain_failures(n, m, rng)), 0.0)
    for n in range(3, n_max + 1):
        for m in range(1, min(support_m_max, m_max) + 1):
            out.add("jet_coefficient_supports", "supports of a_p and b_p",
                    len(bc.support_violations(n, m)), 0.0)
    for n in range(3, tensor_n_max + 1):
        g = MetricPoint.euclidean(n - 1, exact=True)
        for m in range(1, min(tensor_m_max, m_max) + 1):
            u2m = bc.random_rational_tensor(rng, n - 1, 2 * m)
            u2m1 = bc.random_rational_tensor(rng, n - 1, 2 * m + 1)
            v = bc.normal_derivative_tensors(u2m, u2m1, g, n, m)
            chain = max(float(abs(r.max_abs())) for r in bc.trace_chain_residuals(v, g))
            rec = max(float(abs(r.max_abs())) for r in bc.recurrence_residuals(v, u2m, u2m1, g, n, m))
            out.add("trace_free_chain_tensors", "normal derivatives form a trace-free chain", chain, 0.0)
            out.add("normal_derivative_recurrences", "recurrences for the normal derivatives", rec, 0.0)
    return out.checks()


# --------------------------------------------------------------------------
# 9. kinetic consistency


def kinetic_suite(seed: int = 0, M_max: int = 3, degree: int = 2, lattice: int = 4,
                  tol: float = 1e-6) -> list[Check]:
    from .geom import named_chart
    from .kinetic import consistency_residual, random_stack

    rng = np.random.default_rng(seed)
    out = _Collector()
    for spec, label in (("euclidean", "flat"), ("conformal:x", "mu_x")):
        chart = named_chart(spec)
        X = chart.lattice(lattice)
        for M in range(M_max + 1):
            U = random_stack(chart, M, degree, rng)
            out.add(f"transport_relations_vs_sampling_{label}", "Fourier form of the kinetic equation",
                    consistency_residual(U, X), tol)
    return out.checks()


# --------------------------------------------------------------------------
# 10. two-dimensional conformal Killing tensors and holomorphy


def holomorphic_suite(m_max: int = 3, tol: float = 1e-9, fail_floor: float = 1e-3,
                      lattice: int = 7) -> list[Check]:
    import jax.numpy as jnp

    from .ckt import ck_residual, ckt_from_holomorphic
    from .geom import named_chart

    out = _Collector()
    for spec, label in (("conformal:zero", "mu_0"), ("conformal:x", "mu_x")):
        chart = named_chart(spec)
        for m in range(1, m_max + 1):
            for k in range(4):
                u = ckt_from_holomorphic(lambda z, k=k: z**k, m, chart)
                r = ck_residual(u, lattice=lattice, tol=tol)
                out.add(f"holomorphic_w_is_ckt_{label}", "holomorphic data give conformal Killing tensors",
                        max(r.pdu, r.ju), tol)
                w = lambda z, k=k: z**k + 0.1 * jnp.conj(z) ** (k + 1)
                r = ck_residual(ckt_from_holomorphic(w, m, chart), lattice=lattice, tol=tol)
                # residual is 1/pdu so that "passes" means pdu exceeds the floor
                out.add(f"perturbed_w_is_rejected_{label}", "non-holomorphic data fail the test",
                        fail_floor / max(r.pdu, TINY), 1.0)
    return out.checks()


# --------------------------------------------------------------------------
# 11. decomposition solver


def decomposition_suite(m: int = 2, meshes=(17, 33, 65), min_order: float = 1.8) -> list[Check]:
    from .decomp import (assemble_bvp, decompose_field, manufactured_field, refinement_study,
                         smallest_eigenvalue)

    rep = refinement_study(m, meshes)
    out = []
    for key in ("v", "lam", "ft"):
        order = rep.orders.get(key)
        order = float("nan") if order is None else order
        # residual min_order / order <= 1 iff order >= min_order
        out.append(Check(f"convergence_order_{key}", "regular solvability of the decomposition",
                         min_order / order if order > 0 else float("inf"), 1.0))
    for N in meshes:
        f, *_ = manufactured_field(N, m)
        res = decompose_field(f)
        h = f.h
        out.append(Check(f"trace_constraint_N{N}", "trace-free component", res.trace_residual / (10 * h * h), 1.0))
        out.append(Check(f"divergence_constraint_N{N}", "divergence-free component",
                         res.divergence_residual / (10 * h * h), 1.0))
    f, *_ = manufactured_field(meshes[0], m)
    lam_min = smallest_eigenvalue(assemble_bvp(f))
    out.append(Check("operator_positive_definite", "ellipticity of the boundary value problem",
                     0.0 if lam_min > 0 else 1.0, 0.0))
    out.append(Check("stability_ratios_bounded", "stability of the decomposition",
                     rep.spread, 0.2))
    return out


# --------------------------------------------------------------------------
# registry

SUITES: dict[str, Callable[..., list[Check]]] = {
    "algebra": algebra_suite,
    "norm-constant": norm_constant_suite,
    "differential": differential_suite,
    "flat-exact": flat_exact_suite,
    "ck-dimensions": ck_dimension_suite,
    "constrained": constrained_suite,
    "jet": jet_suite,
    "coeffs": coeffs_suite,
    "kinetic": kinetic_suite,
    "holomorphic": holomorphic_suite,
    "decomposition": decomposition_suite,
}

# wall-clock budgets in seconds
RUNTIME_LIMITS = {
    "algebra": 30, "norm-constant": 10, "differential": 60, "flat-exact": 60,
    "ck-dimensions": 300, "constrained": 300, "jet": 120, "coeffs": 60,
    "kinetic": 60, "holomorphic": 30, "decomposition": 300,
}


def run_suite(name: str, **params) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; known: {sorted(SUITES)}")
    t0 = time.perf_counter()
    checks = SUITES[name](**params)
    return SuiteResult(name, tuple(checks), time.perf_counter() - t0, dict(params))


__all__ = [
    "Check",
    "DIFFERENTIAL_METRICS",
    "RUNTIME_LIMITS",
    "SUITES",
    "SuiteResult",
    "algebra_suite",
    "ck_dimension_suite",
    "coeffs_suite",
    "constrained_suite",
    "decomposition_suite",
    "differential_identities",
    "differential_suite",
    "flat_exact_suite",
    "holomorphic_suite",
    "jet_suite",
    "kinetic_suite",
    "norm_constant_formula",
    "norm_constant_suite",
    "run_suite",
]
