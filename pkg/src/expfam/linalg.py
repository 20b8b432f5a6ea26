"""Hermitian spectral calculus: exponentials, logarithms, entropies, distances.

All distance and entropy values exposed by the package are in bits; the
exponential-coordinate calculus (free energy, dual objective) works in
nats, and conversion happens once at the API boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

LN2 = math.log(2.0)

HERMITICITY_TOL = 1e-10
SUPPORT_TOL = 1e-13
EXP_OVERFLOW = 700.0


class SingularSupportError(ValueError):
    """Raised when a logarithm of a rank-deficient operator is requested."""


def require_hermitian(matrix: np.ndarray, tol: float = HERMITICITY_TOL, name: str = "operator") -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {matrix.shape}")
    dev = np.abs(matrix - matrix.conj().T).max()
    if dev > tol:
        raise ValueError(f"{name} is not Hermitian: max deviation {dev:.3e} > {tol:.0e}")
    return matrix


@dataclass
class SpectralDecomposition:
    """Eigenvalues (ascending) and unitary eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def eig_hermitian(matrix: np.ndarray) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix."""
    matrix = require_hermitian(matrix)
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def matrix_exp_hermitian(matrix: np.ndarray) -> np.ndarray:
    """Matrix exponential of a Hermitian matrix via eigendecomposition."""
    dec = eig_hermitian(matrix)
    if dec.eigenvalues.max() > EXP_OVERFLOW:
        raise OverflowError(
            f"matrix exponential diverges: max eigenvalue {dec.eigenvalues.max():.2f} > {EXP_OVERFLOW}"
        )
    v = dec.eigenvectors
    out = (v * np.exp(dec.eigenvalues)) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def matrix_log_psd(matrix: np.ndarray) -> np.ndarray:
    """Principal natural logarithm of a positive-definite matrix."""
    dec = eig_hermitian(matrix)
    small = dec.eigenvalues.min()
    if small <= SUPPORT_TOL:
        raise SingularSupportError(
            f"operator is singular within tolerance (min eigenvalue {small:.3e})"
        )
    v = dec.eigenvectors
    out = (v * np.log(dec.eigenvalues)) @ v.conj().T
    return 0.5 * (out + out.conj().T)


def _clipped_spectrum(rho: np.ndarray) -> np.ndarray:
    eigenvalues = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    if eigenvalues.min() < -1e-10:
        raise ValueError(f"state has negative eigenvalue {eigenvalues.min():.3e}")
    return np.clip(eigenvalues, 0.0, None)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy ``-tr(rho log2 rho)`` in bits; eigenvalues below 1e-15 contribute 0."""
    p = _clipped_spectrum(rho)
    p = p[p > 1e-15]
    value = float(-np.dot(p, np.log2(p)))
    if -1e-12 < value < 0.0:
        value = 0.0
    return value


def relative_entropy(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Quantum relative entropy ``D(rho||sigma)`` in bits.

    Returns ``math.inf`` when ``rho`` carries more than 1e-10 weight outside
    the numerical support of ``sigma``.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    p = _clipped_spectrum(rho)
    mask = p > 1e-15
    term_rho = float(np.dot(p[mask], np.log2(p[mask])))

    q, v = np.linalg.eigh(sigma)
    weights = np.einsum("ij,jk,ki->i", v.conj().T, rho, v).real
    support = q > SUPPORT_TOL
    outside = float(weights[~support].sum())
    if outside > 1e-10:
        return math.inf
    term_sigma = float(np.dot(weights[support], np.log2(q[support])))
    value = term_rho - term_sigma
    if -1e-12 < value < 0.0:
        value = 0.0
    return value


def free_energy(matrix: np.ndarray) -> float:
    """Log partition function ``ln tr exp(H)`` in nats, computed stably."""
    matrix = require_hermitian(matrix)
    return float(logsumexp(np.linalg.eigvalsh(matrix)))


def trace_product(a: np.ndarray, b: np.ndarray) -> complex:
    """``tr(a @ b)`` without forming the product matrix."""
    return complex(np.einsum("ij,ji->", a, b))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``(1/2) ||a - b||_1`` for Hermitian ``a``, ``b``."""
    return 0.5 * float(np.abs(np.linalg.eigvalsh(a - b)).sum())
