"""QCBP solver tests: closed-form instances, a soft-threshold prox oracle,
Pareto-curve behavior, and a sparse-recovery suite on Gaussian matrices."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rgsfcs import QcbpProblem, solve_qcbp
from rgsfcs.errors import ShapeError
from rgsfcs.solver import (
    STATUS_CONVERGED,
    STATUS_INFEASIBLE,
    adjoint_matvec,
    matvec,
    project_l1_complex,
)


def soft_threshold_oracle(y, sigma):
    """Solution of min ||z||_1 s.t. ||y - z||_2 <= sigma by bisection on the
    shrinkage threshold (closed-form prox structure for identity matrices)."""
    mod = np.abs(y)
    lo, hi = 0.0, mod.max()
    for _ in range(200):
        t = 0.5 * (lo + hi)
        resid = np.linalg.norm(np.minimum(mod, t))
        if resid > sigma:
            hi = t
        else:
            lo = t
    t = 0.5 * (lo + hi)
    return y * np.maximum(mod - t, 0.0) / np.where(mod > 0, mod, 1.0)


# ---------------------------------------------------------------------------
# matvec / adjoint / projection
# ---------------------------------------------------------------------------

def test_matvec_identity_and_zero():
    x = np.array([1.0 + 2j, -3.0])
    assert matvec(np.eye(2), x) == pytest.approx(x)
    assert matvec(np.zeros((3, 2)), x) == pytest.approx(np.zeros(3))


def test_adjoint_identity():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    x = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    y = rng.standard_normal(5) + 1j * rng.standard_normal(5)
    lhs = np.vdot(y, matvec(a, x))
    rhs = np.vdot(adjoint_matvec(a, y), x)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_matvec_shape_errors():
    with pytest.raises(ShapeError):
        matvec(np.eye(2), np.zeros(3))
    with pytest.raises(ShapeError):
        adjoint_matvec(np.eye(2), np.zeros(3))


@given(
    arrays(
        np.float64,
        st.integers(min_value=1, max_value=12).map(lambda n: (2, n)),
        elements=st.floats(min_value=-10, max_value=10, allow_nan=False),
    ),
    st.floats(min_value=0.01, max_value=20.0),
)
def test_l1_projection_properties(parts, tau):
    z = parts[0] + 1j * parts[1]
    p = project_l1_complex(z, tau)
    # feasible, idempotent, and phase-preserving
    assert np.sum(np.abs(p)) <= tau * (1 + 1e-9)
    assert project_l1_complex(p, tau) == pytest.approx(p, abs=1e-12)
    if np.sum(np.abs(z)) <= tau:
        assert p == pytest.approx(z)
    live = (np.abs(z) > 1e-12) & (np.abs(p) > 1e-12)
    assert np.angle(p[live]) == pytest.approx(np.angle(z[live]), abs=1e-12)


def test_l1_projection_moduli_are_simplex_projection():
    z = np.array([3.0, -1.0 + 1j, 0.5j])
    p = project_l1_complex(z, 2.0)
    # uniform shrink of the moduli by the simplex threshold
    assert np.sum(np.abs(p)) == pytest.approx(2.0, abs=1e-12)
    shrink = np.abs(z) - np.abs(p)
    live = np.abs(p) > 0
    assert np.ptp(shrink[live]) == pytest.approx(0.0, abs=1e-12)


# ---------------------------------------------------------------------------
# solve_qcbp closed-form instances
# ---------------------------------------------------------------------------

def test_diagonal_exact_solution():
    prob = QcbpProblem(matrix=np.diag([2.0, 1.0]), rhs=np.array([2.0, 1.0]), sigma=0.0)
    sol = solve_qcbp(prob)
    assert sol.status == STATUS_CONVERGED
    assert sol.z == pytest.approx([1.0, 1.0], abs=1e-5)


def test_underdetermined_prefers_large_gain_column():
    prob = QcbpProblem(matrix=np.array([[1.0, 2.0]]), rhs=np.array([2.0]), sigma=0.0)
    sol = solve_qcbp(prob)
    assert sol.z == pytest.approx([0.0, 1.0], abs=1e-5)
    assert sol.l1_norm == pytest.approx(1.0, abs=1e-5)


def test_zero_rhs_returns_zero():
    prob = QcbpProblem(matrix=np.eye(3), rhs=np.zeros(3), sigma=0.0)
    sol = solve_qcbp(prob)
    assert sol.status == STATUS_CONVERGED
    assert sol.z == pytest.approx(np.zeros(3))
    assert sol.iterations == 0


def test_rhs_inside_ball_returns_zero():
    prob = QcbpProblem(matrix=np.eye(2), rhs=np.array([0.1, 0.1]), sigma=1.0)
    sol = solve_qcbp(prob)
    assert sol.z == pytest.approx(np.zeros(2))
    assert sol.status == STATUS_CONVERGED


def test_identity_soft_threshold_oracle():
    rng = np.random.default_rng(7)
    y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    sigma = float(np.linalg.norm(y)) / 2.0
    sol = solve_qcbp(QcbpProblem(matrix=np.eye(8), rhs=y, sigma=sigma))
    oracle = soft_threshold_oracle(y, sigma)
    assert sol.status == STATUS_CONVERGED
    assert sol.residual_norm <= sigma * (1 + 1e-6)
    assert sol.l1_norm == pytest.approx(np.sum(np.abs(oracle)), abs=1e-6)


def test_converged_residual_respects_sigma():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((20, 40)) + 1j * rng.standard_normal((20, 40))
    x = np.zeros(40, dtype=complex)
    x[[3, 17, 31]] = [1.0, -2.0j, 0.5 + 0.5j]
    y = a @ x
    sigma = 0.05 * float(np.linalg.norm(y))
    sol = solve_qcbp(QcbpProblem(matrix=a, rhs=y, sigma=sigma))
    assert sol.status == STATUS_CONVERGED
    assert sol.residual_norm <= sigma * (1 + 1e-6)


def test_pareto_values_non_increasing():
    rng = np.random.default_rng(13)
    a = rng.standard_normal((15, 30))
    x = np.zeros(30)
    x[[2, 9]] = [1.0, -1.5]
    y = a @ x
    sol = solve_qcbp(QcbpProblem(matrix=a, rhs=y, sigma=0.0))
    phi = np.array(sol.pareto_values)
    assert np.all(np.diff(phi) <= 1e-9 * phi[0])


def test_scaling_equivariance():
    rng = np.random.default_rng(17)
    a = rng.standard_normal((12, 24)) + 1j * rng.standard_normal((12, 24))
    x = np.zeros(24, dtype=complex)
    x[[1, 8, 20]] = [2.0, 1j, -0.7]
    y = a @ x + 0.01 * rng.standard_normal(12)
    sigma = 0.05
    base = solve_qcbp(QcbpProblem(matrix=a, rhs=y, sigma=sigma))
    c = 3.7
    scaled = solve_qcbp(QcbpProblem(matrix=c * a, rhs=c * y, sigma=c * sigma))
    assert scaled.z == pytest.approx(base.z, abs=1e-4 * np.abs(base.z).max())


def test_infeasible_detected():
    # rhs orthogonal to the column space and sigma below its norm
    a = np.array([[1.0], [0.0]])
    y = np.array([0.0, 1.0])
    sol = solve_qcbp(QcbpProblem(matrix=a, rhs=y, sigma=0.5))
    assert sol.status == STATUS_INFEASIBLE


def test_gaussian_sparse_recovery_sample():
    rng = np.random.default_rng(23)
    failures = 0
    for _ in range(10):
        a = rng.standard_normal((40, 100)) / np.sqrt(40)
        x = np.zeros(100, dtype=complex)
        sup = rng.choice(100, 5, replace=False)
        x[sup] = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        y = a @ x
        sol = solve_qcbp(QcbpProblem(matrix=a, rhs=y, sigma=0.0))
        if np.linalg.norm(sol.z - x) > 1e-5 * np.linalg.norm(x):
            failures += 1
    assert failures == 0


# ---------------------------------------------------------------------------
# Problem validation
# ---------------------------------------------------------------------------

def test_problem_validation():
    with pytest.raises(ShapeError):
        QcbpProblem(matrix=np.eye(2), rhs=np.zeros(3), sigma=0.0)
    with pytest.raises(ShapeError):
        QcbpProblem(matrix=np.zeros(4), rhs=np.zeros(4), sigma=0.0)
    with pytest.raises(ShapeError):
        QcbpProblem(matrix=np.eye(2), rhs=np.zeros(2), sigma=-1.0)


def test_default_tolerances():
    prob = QcbpProblem(matrix=np.eye(2), rhs=np.zeros(2), sigma=0.0)
    assert prob.feas_tol == 1e-6
    assert prob.opt_tol == 1e-6
    assert prob.max_iters == 10_000
    assert prob.max_newton == 40


@settings(deadline=None, max_examples=25)
@given(st.integers(min_value=0, max_value=2**31))
def test_z_zero_feasible_iff_rhs_within_sigma(seed):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(4)
    sigma = float(rng.uniform(0, 2 * np.linalg.norm(y)))
    sol = solve_qcbp(QcbpProblem(matrix=np.eye(4), rhs=y, sigma=sigma))
    if np.linalg.norm(y) <= sigma:
        assert np.all(sol.z == 0)
    else:
        assert np.any(sol.z != 0)
