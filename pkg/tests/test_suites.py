import numpy as np
import pytest

from symten.suites import (
    RUNTIME_LIMITS,
    SUITES,
    Check,
    algebra_suite,
    coeffs_suite,
    norm_constant_formula,
    run_suite,
)
from symten.sphere import norm_constant


def test_check_verdicts():
    assert Check("a", "x", 1e-12, 1e-10).passed
    assert not Check("a", "x", 1e-9, 1e-10).passed
    assert not Check("a", "x", float("nan"), 1.0).passed
    d = Check("a", "x", 0.0, 0.0, cases=3).as_dict()
    assert d == {"name": "a", "paper_anchor": "x", "residual": 0.0, "tol": 0.0, "cases": 3, "pass": True}


def test_registry():
    assert set(SUITES) == set(RUNTIME_LIMITS)
    assert len(SUITES) == 11
    with pytest.raises(KeyError):
        run_suite("nope")


def test_norm_constant_formula_matches_sphere():
    for n in (2, 3, 5):
        for m in range(5):
            assert norm_constant_formula(n, m) == pytest.approx(norm_constant(n, m), rel=1e-14)


def test_small_algebra_suite():
    checks = algebra_suite(seed=1, cases=10, dims=(2, 3), m_max=3)
    assert checks and all(c.passed for c in checks)
    assert len({c.name for c in checks}) == len(checks)


def test_small_coeffs_suite():
    checks = coeffs_suite(seed=1, n_max=4, m_max=3, support_m_max=3, tensor_n_max=3, tensor_m_max=1)
    assert all(c.passed and c.residual == 0 for c in checks)


def test_small_differential_suite():
    res = run_suite("differential", m_max=1, degree=2, points=2, green=False)
    assert res.passed, [c for c in res.checks if not c.passed]


def test_small_holomorphic_suite():
    res = run_suite("holomorphic", m_max=1, lattice=3)
    assert res.passed
    names = {c.name for c in res.checks}
    assert {"holomorphic_w_is_ckt_mu_0", "perturbed_w_is_rejected_mu_x"} <= names


def test_suites_are_seeded():
    a = run_suite("norm-constant", seed=4, dims=(2,), m_max=2)
    b = run_suite("norm-constant", seed=4, dims=(2,), m_max=2)
    assert [c.residual for c in a.checks] == [c.residual for c in b.checks]
    assert np.all([c.passed for c in a.checks])
