"""Independent verification of projections via the smooth convex dual.

Minimizes ``f(theta) = psi(theta) - theta . eta(rho)`` over the k-local
coefficient space.  The gradient is exactly the moment mismatch
``eta(tau(theta)) - eta(rho)``, so the stopping residual of this oracle and
the sweep residual of the iterative projector measure the same thing.
Plain gradient descent with Armijo backtracking is deliberately simple to
keep the oracle independent of the iterative machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .linalg import LN2, von_neumann_entropy
from .pauli import num_qubits
from .projection import ProjectionConfig, ProjectionResult, _build_terms, _distance_bits
from .symmetry import InvariantBasis

ARMIJO_C1 = 1e-4
MIN_STEP = 1e-18


@dataclass
class DualState:
    """One gradient-descent iterate of the dual problem."""

    theta: np.ndarray
    objective_nats: float
    gradient: np.ndarray
    iterations: int


def _evaluate(theta: np.ndarray, terms, targets: np.ndarray, dim: int):
    ham = np.zeros((dim, dim), dtype=complex)
    for coeff, term in zip(theta, terms):
        if coeff:
            term.add_to(ham, coeff)
    lam, vec = np.linalg.eigh(ham)
    psi = float(logsumexp(lam))
    tau = (vec * np.exp(lam - psi)) @ vec.conj().T
    tau = 0.5 * (tau + tau.conj().T)
    means = np.array([t.mean(tau) for t in terms]) if terms else np.zeros(0)
    value = psi - float(np.dot(theta, targets))
    gradient = means - targets
    return value, gradient, tau, psi


def dual_objective(theta, target_eta, n: int, k: int, basis: Optional[InvariantBasis] = None):
    """Dual value (nats) and gradient for coefficients over the weight-<=k basis.

    ``target_eta`` are the Bloch coefficients of the target state on the
    same basis, in the same order.
    """
    terms = _build_terms(n, k, basis)
    theta = np.asarray(theta, dtype=float)
    targets = np.asarray(target_eta, dtype=float)
    if theta.shape != (len(terms),) or targets.shape != (len(terms),):
        raise ValueError(
            f"theta and target_eta must have length {len(terms)} for n={n}, k={k}"
        )
    value, gradient, _, _ = _evaluate(theta, terms, targets, 1 << n)
    return value, gradient


def minimize_dual(
    rho: np.ndarray,
    k: int,
    config: Optional[ProjectionConfig] = None,
    basis: Optional[InvariantBasis] = None,
    theta0: Optional[np.ndarray] = None,
) -> ProjectionResult:
    """Project ``rho`` by minimizing the convex dual; same result shape as ``project``.

    Backtracking line search (Armijo condition, factor 0.5, unit initial
    step) until the sup-norm of the gradient, i.e. the worst moment
    mismatch, drops below ``config.tol`` or ``config.dual_max_iters`` is hit.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    if not 1 <= k <= n:
        raise ValueError(f"weight bound k={k} out of range [1, {n}]")
    cfg = (config or ProjectionConfig()).resolved(n)
    terms = _build_terms(n, k, basis)
    m = len(terms)
    dim = 1 << n
    targets = np.array([t.mean(rho) for t in terms]) if m else np.zeros(0)
    entropy_state = von_neumann_entropy(rho)

    theta = np.zeros(m) if theta0 is None else np.asarray(theta0, dtype=float).copy()
    if theta.shape != (m,):
        raise ValueError(f"theta0 must have length {m}")
    value, gradient, tau, psi = _evaluate(theta, terms, targets, dim)
    state = DualState(theta=theta, objective_nats=value, gradient=gradient, iterations=0)

    history = []
    diverged = False
    divergence = None
    stalled = False
    backtracks = 0

    def residual_of(grad: np.ndarray) -> float:
        return float(np.abs(grad).max()) if m else 0.0

    residual = residual_of(state.gradient)
    while residual > cfg.tol and state.iterations < cfg.dual_max_iters:
        grad_sq = float(np.dot(state.gradient, state.gradient))
        step = 1.0
        while True:
            trial = state.theta - step * state.gradient
            trial_value, trial_grad, trial_tau, trial_psi = _evaluate(trial, terms, targets, dim)
            if trial_value <= state.objective_nats - ARMIJO_C1 * step * grad_sq:
                break
            step *= 0.5
            backtracks += 1
            if step < MIN_STEP:
                stalled = True
                break
        if stalled:
            break
        if np.abs(trial).max() > cfg.theta_cap:
            diverged = True
            worst = int(np.abs(trial).argmax())
            divergence = (
                f"coefficient theta[{terms[worst].label}] = {trial[worst]:.4g} exceeded the cap "
                f"{cfg.theta_cap:g}; the projection approaches the family boundary"
            )
            break
        state = DualState(
            theta=trial,
            objective_nats=trial_value,
            gradient=trial_grad,
            iterations=state.iterations + 1,
        )
        tau, psi = trial_tau, trial_psi
        residual = residual_of(state.gradient)
        history.append((residual, _distance_bits(n, entropy_state, state.theta, targets, psi)))

    converged = residual <= cfg.tol and not diverged
    distance = _distance_bits(n, entropy_state, state.theta, targets, psi)
    return ProjectionResult(
        n=n,
        k=k,
        method="dual",
        basis_labels=[t.label for t in terms],
        theta=state.theta.copy(),
        tau=tau,
        distance_bits=distance,
        residual=residual,
        sweeps=state.iterations,
        converged=converged,
        entropy_state_bits=entropy_state,
        entropy_projection_bits=von_neumann_entropy(tau),
        diverged=diverged,
        divergence=divergence,
        history=history,
        diagnostics={
            "basis_size": m,
            "symmetry_reduced": basis is not None,
            "tol": cfg.tol,
            "max_iterations": cfg.dual_max_iters,
            "objective_nats": state.objective_nats,
            "backtracks": backtracks,
            "stalled": stalled,
        },
    )
