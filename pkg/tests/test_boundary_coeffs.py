from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symten.boundary_coeffs import (
    a_coeff,
    a_recurrence,
    a_recurrence_without_s,
    ap_coeff,
    b_coeff,
    b_recurrence,
    bp_coeff,
    coeff_table,
    double_factorial,
    normal_derivative_recursive,
    normal_derivative_tensors,
    random_rational_tensor,
    recurrence_residuals,
    support_p,
    support_violations,
    trace_chain_failures,
    trace_chain_residuals,
    verify_a_relation,
    verify_b_relation,
    verify_closed_forms,
)
from symten.metric_ops import MetricPoint
from symten.symcore import SymTensor


def test_double_factorial():
    assert [double_factorial(k) for k in (-1, 0, 1, 2, 5, 6)] == [1, 1, 1, 2, 15, 48]
    with pytest.raises(ValueError):
        double_factorial(-3)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 8), st.integers(0, 8), st.data())
def test_base_cases(n, m, data):
    s = data.draw(st.integers(0, m))
    sign = (-1) ** (m - s)
    assert a_coeff(n, m, s, 0) == Fraction(sign, 2 * (m - s + 1) * (n + 2 * m + 2 * s - 1))
    assert b_coeff(n, m, s, 0) == Fraction(sign, (2 * m - 2 * s + 1) * (n + 2 * m + 2 * s))


def test_m0_value():
    for n in range(2, 7):
        assert a_coeff(n, 0, 0, 0) == Fraction(1, 2 * (n - 1))


def test_frozen_tables():
    assert coeff_table("a", 3, 2).to_csv().splitlines()[1:] == [
        "0,0,1,36", "1,0,-1,32", "1,1,1,576", "2,0,1,20", "2,1,-3,160", "2,2,1,960"]
    assert coeff_table("b", 3, 2).to_csv().splitlines()[1:] == [
        "0,0,1,35", "1,0,-1,27", "1,1,2,315", "2,0,1,11", "2,1,-20,297", "2,2,8,693"]


def test_index_range():
    with pytest.raises(ValueError):
        a_coeff(3, 2, 1, 2)
    with pytest.raises(ValueError):
        b_coeff(1, 2, 0, 0)
    with pytest.raises(ValueError):
        coeff_table("c", 3, 2)


def test_closed_forms_match_recurrences():
    for n in range(2, 9):
        for m in range(9):
            assert verify_closed_forms(n, m)
    assert coeff_table("a", 4, 3, "recurrence").values == coeff_table("a", 4, 3).values


def test_recurrence_without_s_disagrees():
    assert a_recurrence_without_s(3, 3, 2, 1) != a_recurrence(3, 3, 2, 1)
    assert a_recurrence(3, 3, 2, 1) == a_coeff(3, 3, 2, 1)


def test_relations():
    assert verify_a_relation(3, 3) and verify_a_relation(2, 1) and verify_a_relation(5, 0)
    for n in range(2, 9):
        for m in range(9):
            assert verify_a_relation(n, m)
            assert verify_b_relation(n, m)
    assert not verify_b_relation(3, 2, alt_denominator=True)


def test_b_recurrence_step():
    assert b_recurrence(3, 2, 2, 1) == Fraction(4 * 5, 1 * 11) * b_recurrence(3, 2, 1, 0)


def test_normal_derivatives_zero_data():
    g = MetricPoint.euclidean(2, exact=True)
    z0, z1 = SymTensor.zeros(2, 2, exact=True), SymTensor.zeros(2, 3, exact=True)
    for v in normal_derivative_tensors(z0, z1, g, 3, 1):
        assert v.max_abs() == 0


@pytest.mark.parametrize("n,m", [(3, 1), (3, 2), (4, 1), (4, 2)])
def test_trace_chain_and_recurrences(rng, n, m):
    g = MetricPoint.euclidean(n - 1, exact=True)
    u0, u1 = random_rational_tensor(rng, n - 1, 2 * m), random_rational_tensor(rng, n - 1, 2 * m + 1)
    v = normal_derivative_tensors(u0, u1, g, n, m)
    assert [x.rank for x in v] == list(range(2 * m + 2))
    for r in trace_chain_residuals(v, g):
        assert r.max_abs() == 0
    for r in recurrence_residuals(v, u0, u1, g, n, m):
        assert r.max_abs() == 0


def test_rank_mismatch():
    g = MetricPoint.euclidean(2, exact=True)
    with pytest.raises(ValueError):
        normal_derivative_tensors(SymTensor.zeros(2, 3), SymTensor.zeros(2, 3), g, 3, 1)


def test_recursive_matches_tables_for_odd_rank(rng):
    n, m = 3, 1
    g = MetricPoint.euclidean(2, exact=True)
    u0, u1 = random_rational_tensor(rng, 2, 2), random_rational_tensor(rng, 2, 3)
    closed = normal_derivative_tensors(u0, u1, g, n, m)
    rec = normal_derivative_recursive(u1, u0, g, n, 2 * m + 1)
    for a, b in zip(closed, rec):
        assert (a - b).max_abs() == 0


def test_recursive_even_rank_chain(rng):
    # experimental even-rank branch: trace-free chain on trace-free data
    from symten.metric_ops import project_p

    g = MetricPoint.euclidean(2)
    u_top = project_p(SymTensor.random(rng, 2, 4), g)
    u_next = project_p(SymTensor.random(rng, 2, 3), g)
    v = normal_derivative_recursive(u_top, u_next, g, 3, 4)
    assert [x.rank for x in v] == [0, 1, 2, 3, 4]
    for r in trace_chain_residuals(v, g):
        assert r.max_abs() < 1e-15


@pytest.mark.parametrize("n", range(2, 9))
def test_polynomial_chain(n):
    rng = np.random.default_rng(n)
    for m in range(1, 5):
        assert trace_chain_failures(n, m, rng) == []


def test_polynomial_chain_detects_wrong_table():
    def wrong(n, m, s, k):
        v = a_coeff(n, m, s, k)
        return v * Fraction(101, 100) if (s, k) == (1, 0) else v

    assert trace_chain_failures(3, 2, np.random.default_rng(0), a=wrong)
    with pytest.raises(ValueError):
        trace_chain_failures(3, 0, np.random.default_rng(0))


def test_support_examples():
    assert support_p(3, 0) == (0, 0, 0, 1)
    assert support_p(3, 6) == (2, 2, 4, 2)
    with pytest.raises(ValueError):
        ap_coeff(3, 2, 5, 0)
    with pytest.raises(ValueError):
        bp_coeff(0, 0, 0)


def test_support_sweep():
    for n in range(3, 9):
        for m in range(1, 7):
            assert support_violations(n, m) == []
