"""Scikit-learn style estimators wrapping the projection pipeline.

The projectors are fit-shaped: given a density matrix they estimate the
exponent coefficients of the closest k-local thermal state.  These
wrappers expose that through the usual ``fit`` / ``get_params`` /
``set_params`` surface so the algorithms compose with scikit-learn
tooling (cloning, grid search over ``omega`` or ``k``, pipelines).
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .measures import distance, interaction_ladder
from .pauli import num_qubits
from .projection import ProjectionConfig
from .states import validate_state
from .symmetry import SymmetryGroup, generate_group


def check_density_matrix(X) -> tuple[np.ndarray, int]:
    """Validate array input as a density matrix; return ``(rho, n_qubits)``."""
    rho = np.asarray(X)
    if rho.ndim != 2:
        raise ValueError(f"expected a 2d density matrix, got ndim={rho.ndim}")
    rho = validate_state(rho)
    return rho, num_qubits(rho.shape[0])


def _as_batch(X) -> tuple[list, bool]:
    arr = np.asarray(X)
    if arr.ndim == 2:
        return [arr], True
    if arr.ndim == 3:
        return list(arr), False
    raise ValueError("expected a density matrix (2d) or a stack of them (3d)")


class _ConfigMixin:
    def _config(self) -> ProjectionConfig:
        return ProjectionConfig(
            omega=self.omega,
            max_sweeps=self.max_sweeps,
            tol=self.tol,
            variance_floor=self.variance_floor,
            theta_cap=self.theta_cap,
            track_best=self.track_best,
            dual_max_iters=self.dual_max_iters,
        )

    def _group(self, n: int) -> SymmetryGroup | None:
        if self.symmetry is None:
            return None
        if isinstance(self.symmetry, SymmetryGroup):
            return self.symmetry
        return generate_group(list(self.symmetry), n=n)


class ExponentialFamilyProjection(BaseEstimator, _ConfigMixin):
    """Information projection onto the family of k-local thermal states.

    Parameters
    ----------
    k : int
        Maximum interaction weight of the thermal-state exponents.
    method : str
        ``"iterative"`` (moment-matching sweeps), ``"dual"`` (convex dual
        descent), or ``"both"`` (run both, keep the better value).
    symmetry : sequence of generators or SymmetryGroup, optional
        Reduces the sweep basis to group-invariant terms; the fitted state
        must be invariant under the group.
    omega, max_sweeps, tol, variance_floor, theta_cap, track_best,
    dual_max_iters :
        See :class:`expfam.projection.ProjectionConfig`.

    Attributes
    ----------
    result_ : DistanceResult
        Full projection record (per-method runs, discrepancies).
    tau_ : ndarray
        The projected thermal state.
    theta_ : ndarray or None
        Exponent coefficients over the sweep basis.
    distance_bits_ : float
        Relative entropy from the fitted state to ``tau_``.
    """

    def __init__(
        self,
        k: int = 1,
        method: str = "iterative",
        symmetry=None,
        omega: float | None = None,
        max_sweeps: int | None = None,
        tol: float = 1e-8,
        variance_floor: float = 1e-12,
        theta_cap: float = 50.0,
        track_best: bool = True,
        dual_max_iters: int = 5000,
    ):
        self.k = k
        self.method = method
        self.symmetry = symmetry
        self.omega = omega
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.variance_floor = variance_floor
        self.theta_cap = theta_cap
        self.track_best = track_best
        self.dual_max_iters = dual_max_iters

    def fit(self, X, y=None):
        """Project the density matrix ``X``; fitted attributes describe the result."""
        rho, n = check_density_matrix(X)
        result = distance(
            rho,
            self.k,
            method=self.method,
            config=self._config(),
            symmetry=self._group(n),
        )
        best = result.best
        self.n_qubits_ = n
        self.result_ = result
        self.distance_bits_ = result.value_bits
        if best is not None:
            self.tau_ = best.tau
            self.theta_ = best.theta
            self.basis_labels_ = best.basis_labels
            self.converged_ = best.converged
            self.residual_ = best.residual
        else:
            self.tau_ = rho.copy()
            self.theta_ = None
            self.basis_labels_ = []
            self.converged_ = True
            self.residual_ = 0.0
        return self

    def transform(self, X):
        """Map one or a stack of density matrices to their projections."""
        states, single = _as_batch(X)
        out = []
        for state in states:
            rho, n = check_density_matrix(state)
            result = distance(
                rho,
                self.k,
                method=self.method,
                config=self._config(),
                symmetry=self._group(n),
            )
            best = result.best
            out.append(best.tau if best is not None else rho)
        return out[0] if single else np.array(out)

    def fit_transform(self, X, y=None):
        return self.fit(X).tau_


class ComplexityMeasures(BaseEstimator, _ConfigMixin):
    """Full D_k / C_k ladder as an estimator.

    Attributes after ``fit``: ``report_`` (:class:`MeasureReport`),
    ``distances_`` (dict k -> bits), ``interactions_`` (dict k -> forms),
    ``multi_information_`` (D_1 in bits).
    """

    def __init__(
        self,
        method: str = "iterative",
        symmetry=None,
        ks=None,
        omega: float | None = None,
        max_sweeps: int | None = None,
        tol: float = 1e-8,
        variance_floor: float = 1e-12,
        theta_cap: float = 50.0,
        track_best: bool = True,
        dual_max_iters: int = 5000,
    ):
        self.method = method
        self.symmetry = symmetry
        self.ks = ks
        self.omega = omega
        self.max_sweeps = max_sweeps
        self.tol = tol
        self.variance_floor = variance_floor
        self.theta_cap = theta_cap
        self.track_best = track_best
        self.dual_max_iters = dual_max_iters

    def fit(self, X, y=None):
        rho, n = check_density_matrix(X)
        report = interaction_ladder(
            rho,
            config=self._config(),
            method=self.method,
            symmetry=self._group(n),
            ks=self.ks,
        )
        self.n_qubits_ = n
        self.report_ = report
        self.distances_ = dict(report.distances)
        self.interactions_ = {k: dict(v) for k, v in report.interactions.items()}
        self.multi_information_ = report.distances.get(1)
        return self
