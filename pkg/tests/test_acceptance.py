"""Acceptance criteria, each run at its stated tolerance and wall-clock limit.

Every criterion prints one ``PASS``/``FAIL`` line.  Run on its own with

    pytest tests/test_acceptance.py -v -s
"""

import pytest

from symten.suites import RUNTIME_LIMITS, run_suite

CRITERIA = [
    (1, "algebra", "tensor algebra identities, 200 random cases, rel. residual <= 1e-10"),
    (2, "norm-constant", "sphere norm constant by quadrature, 1e-9"),
    (3, "differential", "differential identities on three metrics and Green's formula, 1e-8"),
    (4, "flat-exact", "flat commutator identities for powers of d, delta, exact"),
    (5, "ck-dimensions", "flat conformal Killing kernel dimensions 10, 15, 35"),
    (6, "constrained", "hyperplane vanishing gives zero, line vanishing gives 10"),
    (7, "jet", "jet of order 2m kills the kernel, order 2m-1 does not"),
    (8, "coeffs", "boundary coefficient combinatorics, exact, n <= 8, m <= 8"),
    (9, "kinetic", "transport relations against sampled H, 1e-6"),
    (10, "holomorphic", "2D conformal Killing tensors and holomorphy"),
    (11, "decomposition", "decomposition solver, order >= 1.8, constraints <= 10 h^2, SPD"),
]


@pytest.mark.parametrize("number,suite,label", CRITERIA, ids=[f"criterion_{c[0]:02d}_{c[1]}" for c in CRITERIA])
def test_criterion(number, suite, label, capsys):
    res = run_suite(suite)
    limit = RUNTIME_LIMITS[suite]
    failed = [c for c in res.checks if not c.passed]
    in_time = res.seconds < limit
    ok = bool(res.checks) and not failed and in_time
    worst = max(res.checks, key=lambda c: c.residual / c.tol if c.tol else c.residual)
    line = (f"{'PASS' if ok else 'FAIL'} criterion {number:2d} [{suite}] {label}: "
            f"{len(res.checks)} checks, worst {worst.name} residual {worst.residual:.3g} (tol {worst.tol:g}), "
            f"{res.seconds:.1f}s of {limit}s")
    with capsys.disabled():
        print("\n" + line)
    assert res.checks, "suite produced no checks"
    assert not failed, "; ".join(f"{c.name}: {c.residual:.3g} > {c.tol:g}" for c in failed)
    assert in_time, f"took {res.seconds:.1f}s, limit {limit}s"
