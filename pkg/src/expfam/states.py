"""Benchmark state constructors, validation, and the JSON state-spec format.

The JSON spec format accepted by :func:`state_from_spec` (and by the CLI):

``{"type": "dicke", "n": 4, "e": 2}``
    Pure Dicke state with ``e`` excitations on ``n`` qubits.
``{"type": "ghz", "n": 3}``
    Pure GHZ state.
``{"type": "raw", "matrix": [[[re, im], ...], ...]}``
    Dense density matrix, row-major, entries as ``[re, im]`` pairs.
``{"type": "mix", "p": 0.5, "base": {...}}``
    White-noise mixture ``p * I/2**n + (1 - p) * base``.

Standard-basis ordering is ``|b_0 ... b_{n-1}>`` with qubit 0 the most
significant bit.
"""

from __future__ import annotations

import json
from math import comb, sqrt

import numpy as np

from .pauli import MAX_QUBITS, num_qubits

TRACE_TOL = 1e-10
HERM_TOL = 1e-10
EIG_TOL = 1e-10


class StateValidationError(ValueError):
    """A matrix failed a density-matrix invariant; names the violation."""

    def __init__(self, violation: str, message: str):
        super().__init__(message)
        self.violation = violation


def _check_size(n: int) -> int:
    n = int(n)
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"system size must be in [1, {MAX_QUBITS}], got {n}")
    return n


def maximally_mixed(n: int) -> np.ndarray:
    n = _check_size(n)
    dim = 1 << n
    return np.eye(dim, dtype=complex) / dim


def dicke(n: int, e: int) -> np.ndarray:
    """Pure Dicke state: equal superposition of basis states with ``e`` ones."""
    n = _check_size(n)
    if not 0 <= e <= n:
        raise ValueError(f"excitation count e={e} out of range [0, {n}]")
    dim = 1 << n
    vec = np.zeros(dim, dtype=complex)
    amp = 1.0 / sqrt(comb(n, e))
    for idx in range(dim):
        if idx.bit_count() == e:
            vec[idx] = amp
    return np.outer(vec, vec.conj())


def ghz(n: int) -> np.ndarray:
    """Pure GHZ state ``(|0...0> + |1...1>)/sqrt(2)``."""
    n = _check_size(n)
    if n < 2:
        raise ValueError("GHZ state needs at least 2 qubits")
    dim = 1 << n
    vec = np.zeros(dim, dtype=complex)
    vec[0] = vec[dim - 1] = 1.0 / sqrt(2.0)
    return np.outer(vec, vec.conj())


def white_noise_mix(rho: np.ndarray, p: float) -> np.ndarray:
    """``p * I/2**n + (1 - p) * rho``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter p={p} out of range [0, 1]")
    n = num_qubits(rho.shape[0])
    return p * maximally_mixed(n) + (1.0 - p) * np.asarray(rho, dtype=complex)


def werner(p: float) -> np.ndarray:
    """Two-qubit Werner state ``p * I/4 + (1 - p) * |psi-><psi-|``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter p={p} out of range [0, 1]")
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = 1.0 / sqrt(2.0)
    singlet[2] = -1.0 / sqrt(2.0)
    return p * maximally_mixed(2) + (1.0 - p) * np.outer(singlet, singlet.conj())


def random_state(n: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix: Haar eigenbasis, flat-Dirichlet eigenvalues.

    Full rank almost surely; pass ``rank`` to force a rank-deficient state.
    """
    n = _check_size(n)
    rng = np.random.default_rng(rng)
    dim = 1 << n
    gauss = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(gauss)
    p = rng.dirichlet(np.ones(dim))
    if rank is not None:
        if not 1 <= rank <= dim:
            raise ValueError(f"rank {rank} out of range [1, {dim}]")
        p[np.argsort(p)[: dim - rank]] = 0.0
        p /= p.sum()
    return (q * p) @ q.conj().T


def validate_state(matrix: np.ndarray) -> np.ndarray:
    """Check trace, Hermiticity and positivity; return the cleaned state.

    Eigenvalues in ``(-1e-10, 0)`` are clipped to zero and trace drift up to
    1e-10 is renormalized.  Anything worse raises
    :class:`StateValidationError` naming the violated invariant.
    """
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise StateValidationError("shape", f"not a square matrix: shape {matrix.shape}")
    num_qubits(matrix.shape[0])

    herm_dev = float(np.abs(matrix - matrix.conj().T).max())
    if herm_dev > HERM_TOL:
        raise StateValidationError(
            "hermiticity", f"not Hermitian: max deviation {herm_dev:.3e} > {HERM_TOL:.0e}"
        )
    matrix = 0.5 * (matrix + matrix.conj().T)

    trace = float(np.trace(matrix).real)
    if abs(trace - 1.0) > TRACE_TOL:
        raise StateValidationError("trace", f"trace {trace!r} deviates from 1 beyond {TRACE_TOL:.0e}")

    eigenvalues, vectors = np.linalg.eigh(matrix)
    low = float(eigenvalues.min())
    if low < -EIG_TOL:
        raise StateValidationError(
            "positivity", f"negative eigenvalue {low:.3e} below -{EIG_TOL:.0e}"
        )
    if low < 0.0 or trace != 1.0:
        p = np.clip(eigenvalues, 0.0, None)
        p = p / p.sum()
        matrix = (vectors * p) @ vectors.conj().T
        matrix = 0.5 * (matrix + matrix.conj().T)
    return matrix


def state_from_spec(spec) -> np.ndarray:
    """Build a density matrix from a JSON state spec (dict or JSON string)."""
    if isinstance(spec, str):
        spec = json.loads(spec)
    if not isinstance(spec, dict) or "type" not in spec:
        raise ValueError("state spec must be an object with a 'type' field")
    kind = spec["type"]
    if kind == "dicke":
        return dicke(_spec_int(spec, "n"), _spec_int(spec, "e"))
    if kind == "ghz":
        return ghz(_spec_int(spec, "n"))
    if kind == "raw":
        if "matrix" not in spec:
            raise ValueError("raw state spec needs a 'matrix' field")
        rows = spec["matrix"]
        try:
            matrix = np.array([[complex(re, im) for re, im in row] for row in rows])
        except (TypeError, ValueError) as exc:
            raise ValueError("raw matrix entries must be [re, im] pairs") from exc
        return validate_state(matrix)
    if kind == "mix":
        if "base" not in spec:
            raise ValueError("mix state spec needs a 'base' field")
        p = float(spec.get("p", 0.0))
        return white_noise_mix(state_from_spec(spec["base"]), p)
    raise ValueError(f"unknown state type {kind!r}")


def _spec_int(spec: dict, field: str) -> int:
    if field not in spec:
        raise ValueError(f"{spec['type']} state spec needs field {field!r}")
    return int(spec[field])
