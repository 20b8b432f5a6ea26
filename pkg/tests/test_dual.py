import math

import numpy as np
import pytest

from expfam.dual import dual_objective, minimize_dual
from expfam.linalg import LN2, trace_distance
from expfam.pauli import enumerate_basis, expectation
from expfam.projection import ProjectionConfig, project, project_product
from expfam.states import ghz, maximally_mixed, random_state

TIGHT = ProjectionConfig(tol=1e-10, max_sweeps=1000)


def targets_of(rho, n, k):
    return np.array([expectation(rho, alpha) for alpha in enumerate_basis(n, k)])


def test_dual_objective_at_zero(rng):
    rho = random_state(2, rng)
    targets = targets_of(rho, 2, 1)
    value, gradient = dual_objective(np.zeros(6), targets, 2, 1)
    assert value == pytest.approx(2 * LN2, abs=1e-12)
    np.testing.assert_allclose(gradient, -targets, atol=1e-12)


def test_dual_objective_mixed_state_optimum():
    targets = targets_of(maximally_mixed(2), 2, 2)
    value, gradient = dual_objective(np.zeros(15), targets, 2, 2)
    assert np.abs(gradient).max() == 0.0
    assert value == pytest.approx(2 * LN2, abs=1e-12)


def test_dual_gradient_matches_finite_differences(rng):
    rho = random_state(2, rng)
    targets = targets_of(rho, 2, 2)
    theta = rng.normal(scale=0.3, size=15)
    value, gradient = dual_objective(theta, targets, 2, 2)
    h = 1e-5
    for i in range(0, 15, 3):
        up = theta.copy(); up[i] += h
        dn = theta.copy(); dn[i] -= h
        fd = (dual_objective(up, targets, 2, 2)[0] - dual_objective(dn, targets, 2, 2)[0]) / (2 * h)
        assert abs(fd - gradient[i]) < 1e-6


def test_dual_convexity_probe(rng):
    rho = random_state(2, rng)
    targets = targets_of(rho, 2, 2)
    for _ in range(10):
        t1 = rng.normal(scale=0.5, size=15)
        t2 = rng.normal(scale=0.5, size=15)
        f1 = dual_objective(t1, targets, 2, 2)[0]
        f2 = dual_objective(t2, targets, 2, 2)[0]
        for t in (0.25, 0.5, 0.75):
            mid = dual_objective(t * t1 + (1 - t) * t2, targets, 2, 2)[0]
            assert mid <= t * f1 + (1 - t) * f2 + 1e-9


def test_minimize_dual_mixed_state_immediate():
    res = minimize_dual(maximally_mixed(3), 2)
    assert res.converged and res.sweeps == 0
    assert res.distance_bits == 0.0
    assert not res.theta.any()


def test_minimize_dual_product_state(rng):
    rho = np.kron(random_state(1, rng), random_state(1, rng))
    res = minimize_dual(rho, 1, TIGHT)
    assert res.converged
    assert trace_distance(res.tau, rho) < 1e-7


def test_minimize_dual_monotone_descent(rng):
    rho = random_state(3, rng)
    res = minimize_dual(rho, 2, TIGHT)
    assert res.converged
    distances = [d for _, d in res.history]
    assert all(b <= a + 1e-12 for a, b in zip(distances, distances[1:]))


def test_minimize_dual_agrees_with_other_methods(rng):
    rho = random_state(2, rng)
    dual = minimize_dual(rho, 1, TIGHT)
    iterative = project(rho, 1, TIGHT)
    analytic = project_product(rho)
    assert trace_distance(dual.tau, iterative.tau) < 1e-6
    assert abs(dual.distance_bits - iterative.distance_bits) < 1e-6
    assert abs(dual.distance_bits - analytic.distance_bits) < 1e-6


def test_minimize_dual_unique_optimum_from_random_starts(rng):
    rho = random_state(2, rng)
    runs = [
        minimize_dual(rho, 2, TIGHT, theta0=rng.normal(scale=0.5, size=15))
        for _ in range(2)
    ]
    assert all(r.converged for r in runs)
    assert trace_distance(runs[0].tau, runs[1].tau) < 1e-6


def test_minimize_dual_residual_is_moment_mismatch(rng):
    rho = random_state(2, rng)
    res = minimize_dual(rho, 2, TIGHT)
    worst = max(abs(expectation(res.tau, a) - expectation(rho, a)) for a in enumerate_basis(2, 2))
    assert abs(res.residual - worst) < 1e-12


def test_minimize_dual_divergence_flag():
    cfg = ProjectionConfig(tol=1e-15, max_sweeps=100, theta_cap=2.0, dual_max_iters=4000)
    res = minimize_dual(ghz(3), 2, cfg)
    assert res.diverged and not res.converged
    assert np.abs(res.theta).max() <= 2.0
    assert "cap" in res.divergence


def test_dual_objective_validates_lengths():
    with pytest.raises(ValueError):
        dual_objective(np.zeros(5), np.zeros(6), 2, 1)
