import math

import numpy as np
import pytest

from expfam.linalg import (
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)
from expfam.pauli import enumerate_basis, expectation
from expfam.projection import (
    ProjectionConfig,
    epsilon_step,
    project,
    project_product,
)
from expfam.states import dicke, ghz, maximally_mixed, random_state, white_noise_mix

TIGHT = ProjectionConfig(tol=1e-10, max_sweeps=1000)


def two_level_thermal(t):
    z = 2 * math.cosh(t)
    return np.diag([math.exp(t) / z, math.exp(-t) / z]).astype(complex)


def test_config_defaults_by_size():
    cfg = ProjectionConfig().resolved(3)
    assert cfg.omega == 0.5 and cfg.max_sweeps == 100
    cfg = ProjectionConfig().resolved(6)
    assert cfg.omega == 0.1 and cfg.max_sweeps == 500
    with pytest.raises(ValueError):
        ProjectionConfig(omega=1.5).resolved(2)


def test_epsilon_step_examples():
    eps, skipped = epsilon_step((3,), 1.0, maximally_mixed(1))
    assert (eps, skipped) == (1.0, False)

    tau = two_level_thermal(0.4)
    current = math.tanh(0.4)
    eps, skipped = epsilon_step((3,), current, tau)
    assert not skipped
    assert eps == pytest.approx(0.0, abs=1e-12)


def test_epsilon_step_two_level_closed_form():
    # mean = tanh t, variance = 1 - tanh^2 t for tau = exp(t Z)/tr
    t, target = 0.4, 0.3
    tau = two_level_thermal(t)
    eps, skipped = epsilon_step((3,), target, tau)
    expected = (target - math.tanh(t)) / (1.0 - math.tanh(t) ** 2)
    assert not skipped
    assert eps == pytest.approx(expected, abs=1e-10)


def test_epsilon_step_variance_floor_skip():
    pure = np.diag([1.0, 0.0]).astype(complex)
    eps, skipped = epsilon_step((3,), 0.5, pure)
    assert skipped and eps == 0.0


def test_epsilon_step_dense_matrix_input(rng):
    tau = random_state(2, rng)
    alpha = (3, 3)
    from expfam.pauli import pauli_matrix

    eps_idx, _ = epsilon_step(alpha, 0.2, tau)
    eps_mat, _ = epsilon_step(pauli_matrix(alpha), 0.2, tau)
    assert eps_idx == pytest.approx(eps_mat, abs=1e-12)


def test_project_maximally_mixed_is_exact_fixed_point():
    for k in (1, 2, 3):
        res = project(maximally_mixed(3), k)
        assert res.converged and res.sweeps == 1
        assert res.distance_bits == 0.0
        assert res.residual == 0.0
        assert not res.theta.any()
        np.testing.assert_array_equal(res.tau, maximally_mixed(3))


def test_project_product_state_k1(rng):
    rho = np.kron(random_state(1, rng), random_state(1, rng))
    res = project(rho, 1, TIGHT)
    assert res.converged
    assert trace_distance(res.tau, rho) < 1e-8
    assert res.distance_bits < 1e-7


def test_project_bell_k1():
    res = project(ghz(2), 1, TIGHT)
    assert res.converged
    np.testing.assert_allclose(res.tau, maximally_mixed(2), atol=1e-10)
    assert res.distance_bits == pytest.approx(2.0, abs=1e-9)


def test_project_moment_matching_full_basis(rng):
    # converged runs match every weight-<=k moment, not only the swept ones
    rho = random_state(3, rng)
    res = project(rho, 2, TIGHT)
    assert res.converged
    worst = max(abs(expectation(res.tau, a) - expectation(rho, a)) for a in enumerate_basis(3, 2))
    assert worst <= 1e-9


def test_project_entropy_and_distance_identities(rng):
    rho = random_state(3, rng)
    res = project(rho, 2, TIGHT)
    assert res.converged
    assert res.entropy_projection_bits >= res.entropy_state_bits - 1e-8
    gap = res.entropy_projection_bits - res.entropy_state_bits
    assert abs(res.distance_bits - gap) < 1e-6
    direct = relative_entropy(rho, res.tau)
    assert abs(res.distance_bits - direct) < 1e-8


def test_project_hierarchy(rng):
    rho = random_state(3, rng)
    values = [project(rho, k, TIGHT).distance_bits for k in (1, 2, 3)]
    assert values[0] >= values[1] - 1e-6
    assert values[1] >= values[2] - 1e-6


def test_project_pythagoras_at_projection(rng):
    # D(rho||rho') = D(rho||proj) + D(proj||rho') for any rho' in the family
    from expfam.linalg import matrix_exp_hermitian
    from expfam.pauli import add_pauli

    rho = random_state(2, rng)
    res = project(rho, 1, TIGHT)
    for _ in range(5):
        ham = np.zeros((4, 4), dtype=complex)
        for alpha in enumerate_basis(2, 1):
            add_pauli(ham, alpha, rng.normal(scale=0.4))
        other = matrix_exp_hermitian(ham)
        other /= np.trace(other).real
        lhs = relative_entropy(rho, other)
        rhs = relative_entropy(rho, res.tau) + relative_entropy(res.tau, other)
        assert abs(lhs - rhs) < 1e-5


def test_project_track_best_on_capped_run(rng):
    rho = random_state(3, rng)
    capped = project(rho, 2, ProjectionConfig(tol=1e-16, max_sweeps=12))
    assert not capped.converged
    assert capped.sweeps == 12
    assert capped.distance_bits == pytest.approx(min(d for _, d in capped.history), abs=1e-15)
    assert capped.diagnostics["best_sweep"] <= 12


def test_project_divergence_flag():
    # the GHZ k=2 projection sits on the family boundary: coefficients grow
    # without bound, tripping a low cap
    cfg = ProjectionConfig(tol=1e-15, variance_floor=1e-300, max_sweeps=500, theta_cap=5.0)
    res = project(ghz(3), 2, cfg)
    assert res.diverged
    assert not res.converged
    assert "theta[" in res.divergence and "cap" in res.divergence
    assert np.abs(res.theta).max() <= 5.0  # best finite iterate is attached
    assert res.distance_bits >= 1.0 - 1e-6  # upper bound on the true distance 1


def test_project_accepts_rank_deficient_input():
    res = project(ghz(2), 1, TIGHT)  # pure state input is fine
    assert res.converged
    assert res.entropy_state_bits == pytest.approx(0.0, abs=1e-10)


def test_project_validates_arguments(rng):
    with pytest.raises(ValueError):
        project(random_state(2, rng), 3)
    from expfam.symmetry import generate_group, invariant_basis

    basis = invariant_basis(2, 1, generate_group([], n=2))
    with pytest.raises(ValueError):
        project(random_state(2, rng), 2, basis=basis)  # k mismatch


def test_project_product_examples(rng):
    rho = np.kron(random_state(1, rng), random_state(1, rng))
    res = project_product(rho)
    assert trace_distance(res.tau, rho) < 1e-12
    assert res.distance_bits < 1e-10

    res = project_product(dicke(4, 2))
    np.testing.assert_allclose(res.tau, maximally_mixed(4), atol=1e-12)
    assert res.distance_bits == pytest.approx(4.0, abs=1e-9)

    res = project_product(ghz(3))
    assert res.distance_bits == pytest.approx(3.0, abs=1e-9)
    assert res.converged and res.residual < 1e-12


def test_project_product_boundary_flag():
    ket0 = np.zeros((2, 2), dtype=complex)
    ket0[0, 0] = 1.0
    rho = np.kron(ghz(2), ket0)
    res = project_product(rho)
    assert res.boundary
    assert res.theta is None
    assert res.distance_bits == pytest.approx(2.0, abs=1e-9)


def test_project_product_theta_reproduces_state(rng):
    from expfam.linalg import matrix_exp_hermitian
    from expfam.pauli import add_pauli

    rho = np.kron(random_state(1, rng), random_state(1, rng))
    res = project_product(rho)
    ham = np.zeros((4, 4), dtype=complex)
    for alpha, value in zip(enumerate_basis(2, 1), res.theta):
        add_pauli(ham, alpha, value)
    rebuilt = matrix_exp_hermitian(ham)
    rebuilt /= np.trace(rebuilt).real
    assert trace_distance(rebuilt, res.tau) < 1e-10


def test_project_product_agrees_with_iterative(rng):
    rho = random_state(3, rng)
    analytic = project_product(rho)
    iterative = project(rho, 1, TIGHT)
    assert trace_distance(analytic.tau, iterative.tau) < 1e-6
    assert abs(analytic.distance_bits - iterative.distance_bits) < 1e-6


def test_result_serialization(rng):
    import json

    res = project(random_state(2, rng), 1, TIGHT)
    payload = res.to_dict(include_tau=True, include_history=True)
    text = json.dumps(payload)
    assert "coefficients" in payload and "tau" in payload and "history" in payload
    assert json.loads(text)["k"] == 1
