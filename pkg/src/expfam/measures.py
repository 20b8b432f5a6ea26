"""Complexity measures built on the projections.

``distance`` computes a single D_k; ``interaction_ladder`` computes all of
them plus the irreducible k-party interaction strengths C_k in three
algebraically equivalent forms.  For an exact projection the forms agree;
their spread is reported as a per-k quality diagnostic of the numerical
projection.  Every computed projection yields an upper bound on the true
distance, so when several methods run the smallest value is reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dual import minimize_dual
from .linalg import SUPPORT_TOL, relative_entropy, von_neumann_entropy
from .pauli import enumerate_basis, expectation, index_label, num_qubits
from .projection import ProjectionConfig, ProjectionResult, project, project_product
from .symmetry import InvariantBasis, SymmetryGroup, generate_group, invariant_basis

METHODS = ("iterative", "dual", "both")


def _resolve_group(symmetry, n: int) -> Optional[SymmetryGroup]:
    if symmetry is None:
        return None
    if isinstance(symmetry, SymmetryGroup):
        return symmetry
    return generate_group(list(symmetry), n=n)


def _reduced_basis(group: Optional[SymmetryGroup], n: int, k: int) -> Optional[InvariantBasis]:
    if group is None:
        return None
    return invariant_basis(n, k, group)


@dataclass
class DistanceResult:
    """One D_k value with the projection runs backing it."""

    k: int
    value_bits: float
    method: str
    runs: dict = field(default_factory=dict)
    discrepancy_bits: Optional[float] = None
    product_check_bits: Optional[float] = None

    @property
    def best(self) -> Optional[ProjectionResult]:
        if not self.runs:
            return None
        return min(self.runs.values(), key=lambda r: r.distance_bits)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "value_bits": self.value_bits,
            "method": self.method,
            "discrepancy_bits": self.discrepancy_bits,
            "product_check_bits": self.product_check_bits,
            "runs": {name: r.to_dict() for name, r in self.runs.items()},
        }


def distance(
    rho: np.ndarray,
    k: int,
    method: str = "iterative",
    config: Optional[ProjectionConfig] = None,
    symmetry=None,
) -> DistanceResult:
    """D_k(rho) in bits; ``method`` is ``iterative``, ``dual``, or ``both``.

    ``k = n`` is zero by definition and returns without computation.  At
    ``k = 1`` the closed-form product projection is always computed as a
    cross-check and participates in the reported minimum.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    if not 1 <= k <= n:
        raise ValueError(f"weight bound k={k} out of range [1, {n}]")
    if k == n:
        return DistanceResult(k=k, value_bits=0.0, method="definition")

    group = _resolve_group(symmetry, n)
    basis = _reduced_basis(group, n, k)
    runs = {}
    if method in ("iterative", "both"):
        runs["iterative"] = project(rho, k, config=config, basis=basis)
    if method in ("dual", "both"):
        runs["dual"] = minimize_dual(rho, k, config=config, basis=basis)
    discrepancy = None
    if len(runs) == 2:
        discrepancy = abs(runs["iterative"].distance_bits - runs["dual"].distance_bits)

    product_check = None
    if k == 1:
        runs["product"] = project_product(rho)
        others = [r.distance_bits for name, r in runs.items() if name != "product"]
        if others:
            product_check = abs(min(others) - runs["product"].distance_bits)

    value = min(r.distance_bits for r in runs.values())
    return DistanceResult(
        k=k,
        value_bits=value,
        method=method,
        runs=runs,
        discrepancy_bits=discrepancy,
        product_check_bits=product_check,
    )


@dataclass
class MeasureReport:
    """Full D_k / C_k ladder for one state."""

    n: int
    method: str
    entropy_state_bits: float
    distances: dict
    projection_entropies: dict
    interactions: dict
    diagnostics: dict

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "method": self.method,
            "entropy_state_bits": self.entropy_state_bits,
            "distances": {str(k): v for k, v in self.distances.items()},
            "projection_entropies": {str(k): v for k, v in self.projection_entropies.items()},
            "interactions": {str(k): dict(v) for k, v in self.interactions.items()},
            "diagnostics": self.diagnostics,
        }


def interaction_ladder(
    rho: np.ndarray,
    config: Optional[ProjectionConfig] = None,
    method: str = "iterative",
    symmetry=None,
    ks=None,
) -> MeasureReport:
    """Compute D_k for all k and the three forms of every C_k.

    The forms are the ladder difference ``D_{k-1} - D_k``, the relative
    entropy ``D(proj_k || proj_{k-1})``, and the entropy difference
    ``S(proj_{k-1}) - S(proj_k)``; ``spread`` is their largest pairwise
    disagreement.  Restricting ``ks`` skips the corresponding rungs.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    ks = sorted(set(range(1, n)) if ks is None else {int(k) for k in ks})
    if any(not 1 <= k <= n - 1 for k in ks):
        raise ValueError(f"ladder ks must lie in [1, {n - 1}], got {ks}")

    group = _resolve_group(symmetry, n)
    entropy_state = von_neumann_entropy(rho)
    results = {k: distance(rho, k, method=method, config=config, symmetry=group) for k in ks}

    distances = {k: res.value_bits for k, res in results.items()}
    distances[n] = 0.0
    taus = {}
    projection_entropies = {}
    for k, res in results.items():
        best = res.best
        taus[k] = best.tau
        projection_entropies[k] = best.entropy_projection_bits

    full_rank = bool(np.linalg.eigvalsh(rho).min() > SUPPORT_TOL)
    if full_rank:
        taus[n] = rho
        projection_entropies[n] = entropy_state

    interactions = {}
    for k in range(2, n + 1):
        if k - 1 not in distances or k not in distances:
            continue
        entry = {"difference": distances[k - 1] - distances[k]}
        if k in taus and k - 1 in taus:
            value = relative_entropy(taus[k], taus[k - 1])
            if value != float("inf"):
                entry["relative_entropy"] = value
        if k in projection_entropies and k - 1 in projection_entropies:
            entry["entropy_difference"] = projection_entropies[k - 1] - projection_entropies[k]
        values = [v for v in entry.values()]
        entry["spread"] = max(values) - min(values) if len(values) > 1 else 0.0
        interactions[k] = entry

    diagnostics = {}
    for k, res in results.items():
        best = res.best
        diagnostics[k] = {
            "method": best.method,
            "converged": best.converged,
            "diverged": best.diverged,
            "residual": best.residual,
            "sweeps": best.sweeps,
            "discrepancy_bits": res.discrepancy_bits,
            "product_check_bits": res.product_check_bits,
        }
    return MeasureReport(
        n=n,
        method=method,
        entropy_state_bits=entropy_state,
        distances=distances,
        projection_entropies=projection_entropies,
        interactions=interactions,
        diagnostics=diagnostics,
    )


def multi_information(rho: np.ndarray) -> float:
    """Total interaction D_1 in bits, via the closed-form product projection."""
    return project_product(rho).distance_bits


def d1_un_invariant(rho: np.ndarray) -> float:
    """``D_1 = n - S(rho)`` for states invariant under all local unitaries.

    Verifies the necessary condition that every single-qubit Bloch
    coefficient vanishes (within 1e-9) and refuses otherwise; full
    invariance is the caller's responsibility.
    """
    rho = np.asarray(rho, dtype=complex)
    n = num_qubits(rho.shape[0])
    for alpha in enumerate_basis(n, 1):
        value = expectation(rho, alpha)
        if abs(value) > 1e-9:
            raise ValueError(
                f"state has nonzero single-qubit coefficient <{index_label(alpha)}> = {value:.3e}; "
                "it cannot be invariant under all local unitaries"
            )
    return max(0.0, n - von_neumann_entropy(rho))
