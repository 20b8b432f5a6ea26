"""Iterative information projection onto k-local thermal-state families.

The projector sweeps an orthogonal basis of weight-limited Pauli terms.
For each term ``A`` it nudges the Hamiltonian exponent by ``omega * eps * A``
with ``eps = (<A>_rho - <A>_tau) / Var_tau(A)``, then rebuilds the
normalized thermal state ``tau = exp(H)/tr(exp(H))`` by eigendecomposition.
Sweeps repeat until the maximum moment mismatch over the basis drops below
tolerance.  Because monotone convergence is not guaranteed, the iterate
with the smallest relative-entropy distance seen so far is tracked and
returned.

Rank-deficient targets whose projection lies on the family boundary show
up as diverging exponent coefficients; runs are then flagged ``diverged``
and carry the best finite iterate instead of raising.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import reduce
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .linalg import LN2, SUPPORT_TOL, relative_entropy, trace_product, von_neumann_entropy
from .pauli import enumerate_basis, index_label, num_qubits, string_action
from .symmetry import InvariantBasis, OrbitElement
from .pauli import partial_trace
from .linalg import matrix_log_psd


@dataclass
class ProjectionConfig:
    """Tuning knobs for the projection algorithms.

    ``omega`` and ``max_sweeps`` default to ``None`` and are resolved per
    system size: 0.5 / 100 sweeps up to four qubits, 0.1 / 500 sweeps for
    five and more.  ``dual_max_iters`` caps the gradient-descent oracle.
    """

    omega: Optional[float] = None
    max_sweeps: Optional[int] = None
    tol: float = 1e-8
    variance_floor: float = 1e-12
    theta_cap: float = 50.0
    track_best: bool = True
    dual_max_iters: int = 5000

    def resolved(self, n: int) -> "ProjectionConfig":
        omega = self.omega if self.omega is not None else (0.5 if n <= 4 else 0.1)
        max_sweeps = self.max_sweeps if self.max_sweeps is not None else (100 if n <= 4 else 500)
        cfg = replace(self, omega=omega, max_sweeps=max_sweeps)
        if not 0.0 < cfg.omega <= 1.0:
            raise ValueError(f"omega must be in (0, 1], got {cfg.omega}")
        if cfg.max_sweeps < 1 or cfg.dual_max_iters < 1:
            raise ValueError("iteration limits must be positive")
        if cfg.tol <= 0 or cfg.variance_floor <= 0 or cfg.theta_cap <= 0:
            raise ValueError("tol, variance_floor and theta_cap must be positive")
        return cfg


class _StringTerm:
    """Single Pauli string; involutory, so its variance needs only the mean."""

    __slots__ = ("label", "alpha", "_flip", "_vals", "_cols")

    def __init__(self, alpha: tuple):
        self.alpha = alpha
        self.label = index_label(alpha)
        self._flip, self._vals = string_action(alpha)
        self._cols = np.arange(self._vals.shape[0])

    def mean(self, state: np.ndarray) -> float:
        return float(np.dot(self._vals, state[self._cols, self._cols ^ self._flip]).real)

    def add_to(self, matrix: np.ndarray, coeff: float) -> None:
        matrix[self._cols ^ self._flip, self._cols] += coeff * self._vals

    def second_moment(self, tau: np.ndarray) -> float:
        return 1.0


class _OrbitTerm:
    """Symmetry-averaged term; squares are cached as dense matrices."""

    __slots__ = ("label", "element", "_mat", "_mat2")

    def __init__(self, element: OrbitElement):
        self.element = element
        self.label = element.label
        self._mat = element.matrix()
        self._mat2 = self._mat @ self._mat

    def mean(self, state: np.ndarray) -> float:
        return trace_product(self._mat, state).real

    def add_to(self, matrix: np.ndarray, coeff: float) -> None:
        matrix += coeff * self._mat

    def second_moment(self, tau: np.ndarray) -> float:
        return trace_product(self._mat2, tau).real


def _build_terms(n: int, k: int, basis: Optional[InvariantBasis]):
    if basis is None:
        return [_StringTerm(alpha) for alpha in enumerate_basis(n, k)]
    if basis.n != n:
        raise ValueError(f"basis is for {basis.n} qubits, state has {n}")
    if basis.k != k:
        raise ValueError(f"basis was reduced at k={basis.k}, projection requested k={k}")
    return [
        _StringTerm(e.indices[0]) if e.size == 1 and e.signs[0] > 0 else _OrbitTerm(e)
        for e in basis.elements
    ]


@dataclass
class ProjectionResult:
    """Outcome of one projection run (iterative, dual, or product)."""

    n: int
    k: int
    method: str
    basis_labels: list
    theta: Optional[np.ndarray]
    tau: np.ndarray
    distance_bits: float
    residual: float
    sweeps: int
    converged: bool
    entropy_state_bits: float
    entropy_projection_bits: float
    diverged: bool = False
    divergence: Optional[str] = None
    boundary: bool = False
    history: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def coefficients(self) -> dict:
        if self.theta is None:
            return {}
        return dict(zip(self.basis_labels, (float(t) for t in self.theta)))

    def to_dict(self, include_tau: bool = False, include_history: bool = False) -> dict:
        out = {
            "n": self.n,
            "k": self.k,
            "method": self.method,
            "distance_bits": self.distance_bits,
            "residual": self.residual,
            "sweeps": self.sweeps,
            "converged": self.converged,
            "diverged": self.diverged,
            "divergence": self.divergence,
            "boundary": self.boundary,
            "entropy_state_bits": self.entropy_state_bits,
            "entropy_projection_bits": self.entropy_projection_bits,
            "basis_size": len(self.basis_labels),
            "coefficients": self.coefficients(),
            "diagnostics": self.diagnostics,
        }
        if include_history:
            out["history"] = [[r, d] for r, d in self.history]
        if include_tau:
            out["tau"] = [[[float(z.real), float(z.imag)] for z in row] for row in self.tau]
        return out


def _distance_bits(n: int, entropy_state_bits: float, theta: np.ndarray, targets: np.ndarray, psi: float) -> float:
    """D(rho || tau(theta)) in bits from the free energy and target moments.

    With an all-zero exponent the thermal state is exactly maximally mixed
    and the distance reduces to ``n - S(rho)``, which is exact in bits.
    """
    if theta.size == 0 or not theta.any():
        return max(0.0, n - entropy_state_bits)
    nats = psi - float(np.dot(theta, targets)) - LN2 * entropy_state_bits
    bits = nats / LN2
    if -1e-9 < bits < 0.0:
        bits = 0.0
    return bits


def epsilon_step(element, target_mean: float, tau: np.ndarray, variance_floor: float = 1e-12):
    """Single-term update amplitude ``(target - <A>_tau) / Var_tau(A)``.

    ``element`` may be a Pauli multi-index, an :class:`OrbitElement`, or a
    dense Hermitian matrix.  Returns ``(eps, skipped)``; a variance below
    ``variance_floor`` yields ``(0.0, True)`` instead of an error.
    """
    if isinstance(element, OrbitElement):
        term = _OrbitTerm(element)
        mean = term.mean(tau)
        second = term.second_moment(tau)
    elif isinstance(element, np.ndarray):
        mean = trace_product(element, tau).real
        second = trace_product(element @ element, tau).real
    else:
        term = _StringTerm(tuple(element))
        mean = term.mean(tau)
        second = 1.0
    variance = second - mean * mean
    if variance < variance_floor:
        return 0.0, True
    return (target_mean - mean) / variance, False


@dataclass
class _Snapshot:
    theta: np.ndarray
    tau: np.ndarray
    psi: float
    residual: float
    distance: float
    sweep: int


def project(
    rho: np.ndarray,
    k: int,
    config: Optional[ProjectionConfig] = None,
    basis: Optional[InvariantBasis] = None,
) -> ProjectionResult:
    """Iteratively project ``rho`` onto the family of k-local thermal states.

    Pass ``basis`` (from :func:`expfam.symmetry.invariant_basis`) to sweep
    a symmetry-reduced term set instead of the full weight-``<=k`` Pauli
    basis; ``rho`` must then be invariant under the reducing group.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    if not 1 <= k <= n:
        raise ValueError(f"weight bound k={k} out of range [1, {n}]")
    cfg = (config or ProjectionConfig()).resolved(n)
    terms = _build_terms(n, k, basis)
    m = len(terms)
    labels = [t.label for t in terms]
    targets = np.array([t.mean(rho) for t in terms]) if m else np.zeros(0)
    entropy_state = von_neumann_entropy(rho)

    dim = 1 << n
    theta = np.zeros(m)
    ham = np.zeros((dim, dim), dtype=complex)
    tau = np.eye(dim, dtype=complex) / dim
    psi = math.log(dim)

    def moment_residual(state: np.ndarray) -> float:
        if not m:
            return 0.0
        return float(max(abs(t.mean(state) - targets[i]) for i, t in enumerate(terms)))

    best = _Snapshot(
        theta=theta.copy(),
        tau=tau.copy(),
        psi=psi,
        residual=moment_residual(tau),
        distance=_distance_bits(n, entropy_state, theta, targets, psi),
        sweep=0,
    )
    history = []
    skips = 0
    diverged = False
    divergence = None
    converged = False
    final = best
    sweep = 0

    for sweep in range(1, cfg.max_sweeps + 1):
        for i, term in enumerate(terms):
            mean = term.mean(tau)
            variance = term.second_moment(tau) - mean * mean
            if variance < cfg.variance_floor:
                skips += 1
                continue
            delta = cfg.omega * (targets[i] - mean) / variance
            if delta == 0.0:
                continue
            theta[i] += delta
            if abs(theta[i]) > cfg.theta_cap:
                diverged = True
                divergence = (
                    f"coefficient theta[{term.label}] = {theta[i]:.4g} exceeded the cap "
                    f"{cfg.theta_cap:g}; the projection approaches the family boundary"
                )
                break
            term.add_to(ham, delta)
            lam, vec = np.linalg.eigh(ham)
            psi = float(logsumexp(lam))
            tau = (vec * np.exp(lam - psi)) @ vec.conj().T
            tau = 0.5 * (tau + tau.conj().T)
        if diverged:
            break
        residual = moment_residual(tau)
        distance = _distance_bits(n, entropy_state, theta, targets, psi)
        history.append((residual, distance))
        current = _Snapshot(theta.copy(), tau.copy(), psi, residual, distance, sweep)
        if not cfg.track_best or current.distance <= best.distance:
            best = current
        if residual <= cfg.tol:
            # A converged run returns the moment-matched iterate; minimum-
            # distance tracking only decides capped or diverged runs.
            converged = True
            final = current
            break
        final = best
    else:
        final = best
    if diverged:
        final = best
    return ProjectionResult(
        n=n,
        k=k,
        method="iterative",
        basis_labels=labels,
        theta=final.theta,
        tau=final.tau,
        distance_bits=final.distance,
        residual=final.residual,
        sweeps=sweep,
        converged=converged,
        entropy_state_bits=entropy_state,
        entropy_projection_bits=von_neumann_entropy(final.tau),
        diverged=diverged,
        divergence=divergence,
        history=history,
        diagnostics={
            "basis_size": m,
            "symmetry_reduced": basis is not None,
            "omega": cfg.omega,
            "tol": cfg.tol,
            "max_sweeps": cfg.max_sweeps,
            "skipped_updates": skips,
            "best_sweep": final.sweep,
        },
    )


def project_product(rho: np.ndarray) -> ProjectionResult:
    """Closed-form projection onto product states: tensor the 1-qubit marginals.

    ``D_1 = S(marginal product) - S(rho)``.  A marginal with a vanishing
    eigenvalue puts the projection on the family boundary (rank-deficient
    product); the result is flagged ``boundary`` and the distance falls
    back to the support-aware relative entropy.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    marginals = [partial_trace(rho, [q]) for q in range(n)]
    tau = reduce(np.kron, marginals)
    entropy_state = von_neumann_entropy(rho)
    marginal_entropies = [von_neumann_entropy(r) for r in marginals]
    entropy_tau = float(sum(marginal_entropies))

    boundary = any(np.linalg.eigvalsh(r).min() <= SUPPORT_TOL for r in marginals)
    if boundary:
        distance = relative_entropy(rho, tau)
    else:
        distance = max(0.0, entropy_tau - entropy_state)

    labels = [index_label(alpha) for alpha in enumerate_basis(n, 1)]
    theta = None
    if not boundary:
        coeffs = {}
        for q, marginal in enumerate(marginals):
            log_marginal = matrix_log_psd(marginal)
            for letter in (1, 2, 3):
                alpha = tuple(letter if i == q else 0 for i in range(n))
                coeffs[alpha] = trace_product(log_marginal, _SIGMA_SMALL[letter]).real / 2.0
        theta = np.array([coeffs[alpha] for alpha in enumerate_basis(n, 1)])

    residual = float(
        max(abs(expectation_diff) for expectation_diff in _weight1_mismatch(rho, tau, n))
    )
    return ProjectionResult(
        n=n,
        k=1,
        method="product",
        basis_labels=labels,
        theta=theta,
        tau=tau,
        distance_bits=distance,
        residual=residual,
        sweeps=0,
        converged=True,
        entropy_state_bits=entropy_state,
        entropy_projection_bits=entropy_tau,
        boundary=boundary,
        history=[(residual, distance)],
        diagnostics={"marginal_entropies_bits": marginal_entropies},
    )


_SIGMA_SMALL = {
    1: np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    2: np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    3: np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def _weight1_mismatch(rho, tau, n):
    for alpha in enumerate_basis(n, 1):
        term = _StringTerm(alpha)
        yield term.mean(tau) - term.mean(rho)
