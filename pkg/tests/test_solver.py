import numpy as np
import pytest

from polyrigid.errors import MaxIterations, TargetUnattainable
from polyrigid.solver import Problem, SolveReport, SolverConfig, fd_hessian, minimize


def quadratic(A, b):
    return Problem(gradient=lambda u: A @ u - b, lo=np.full(len(b), -np.inf), hi=np.full(len(b), np.inf))


def test_quadratic_converges_fast(rng):
    M = rng.normal(size=(5, 5))
    A = M @ M.T + np.eye(5)
    b = rng.normal(size=5)
    u, rep = minimize(quadratic(A, b), np.zeros(5))
    np.testing.assert_allclose(u, np.linalg.solve(A, b), atol=1e-9)
    assert rep.iterations <= 3 and rep.status == "Success"


def test_fd_hessian_symmetric(rng):
    A = np.diag([1.0, 2.0, 3.0])
    p = quadratic(A, np.zeros(3))
    H = fd_hessian(p, rng.normal(size=3), p.gradient(np.zeros(3)))
    np.testing.assert_allclose(H, A, atol=1e-8)


def test_slice_gauge():
    # W = (sum(u) is free) ; gradient orthogonal to ones
    P = np.eye(3) - np.ones((3, 3)) / 3
    b = np.array([1.0, -2.0, 1.0])
    p = Problem(gradient=lambda u: P @ u - b, lo=np.full(3, -np.inf), hi=np.full(3, np.inf),
                slice_normal=np.ones(3))
    u, _ = minimize(p, np.zeros(3))
    assert abs(u.sum()) <= 1e-12
    np.testing.assert_allclose(P @ u, b, atol=1e-10)


def test_box_is_respected():
    # minimum of (u - 1)^2 / 2 on u < 0 sits at the wall
    p = Problem(gradient=lambda u: u - 1.0, lo=np.array([-np.inf]), hi=np.array([0.0]))
    with pytest.raises(TargetUnattainable) as err:
        minimize(p, np.array([-3.0]))
    assert err.value.report.direction[0] > 0


def test_escape_to_infinity():
    # convex, with gradient increasing to -0.1: the infimum is at +infinity
    p = Problem(gradient=lambda u: -0.5 * (1.0 - np.tanh(u)) - 0.1,
                lo=np.array([-np.inf]), hi=np.array([np.inf]))
    with pytest.raises(TargetUnattainable):
        minimize(p, np.array([0.0]))


def test_max_iterations():
    p = quadratic(np.eye(2), np.ones(2))
    with pytest.raises(MaxIterations) as err:
        minimize(p, np.zeros(2), SolverConfig(max_iter=0))
    assert err.value.report.status == "MaxIterations"


def test_report_lines():
    rep = SolveReport(iterations=3, grad_norm=1e-12, residual=2e-12, gauge=None, status="Success")
    lines = rep.lines()
    assert lines[0] == "iter 3" and lines[3] == "gauge none" and lines[-1] == "status Success"
    rep.barrier = True
    assert "barrier admissible-region" in rep.lines()
