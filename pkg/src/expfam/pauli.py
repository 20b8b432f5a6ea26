"""Multi-index Pauli-string algebra for n-qubit operators.

Conventions used throughout the package:

* A multi-index ``alpha`` is a length-``n`` tuple with entries in
  ``{0, 1, 2, 3}`` standing for ``I, X, Y, Z``.  Qubit ``i`` (0-based) is
  the ``i``-th tensor factor, and in the computational basis
  ``|b_0 ... b_{n-1}>`` bit ``b_0`` is the most significant bit of the
  matrix index.
* Pauli strings are unnormalized: ``tr(sigma_alpha^2) = 2**n``.
* The weight of a multi-index is its number of non-identity entries.

Every Pauli string is a generalized permutation matrix with one nonzero
entry per column, so traces against a density matrix cost ``O(2**n)``
instead of ``O(4**n)``; :func:`string_action` exposes that structure and
:func:`expectation` and :func:`add_pauli` build on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np

MAX_QUBITS = 12

PAULI_LETTERS = "IXYZ"

SIGMA_1Q = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

MultiIndex = tuple  # tuple[int, ...] with entries in {0, 1, 2, 3}


def _check_index(alpha) -> tuple:
    alpha = tuple(int(a) for a in alpha)
    if not 1 <= len(alpha) <= MAX_QUBITS:
        raise ValueError(f"system size must be in [1, {MAX_QUBITS}], got {len(alpha)}")
    if any(a not in (0, 1, 2, 3) for a in alpha):
        raise ValueError(f"multi-index entries must be in {{0,1,2,3}}: {alpha}")
    return alpha


def num_qubits(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension, which must be a power of two."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or (1 << n) != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    if n > MAX_QUBITS:
        raise ValueError(f"dimension {dim} exceeds the {MAX_QUBITS}-qubit cap")
    return n


def weight(alpha) -> int:
    """Number of non-identity entries of a multi-index."""
    return sum(1 for a in alpha if a)


def index_label(alpha) -> str:
    """Human-readable label, e.g. ``(3, 3, 0) -> 'ZZI'``."""
    return "".join(PAULI_LETTERS[a] for a in alpha)


def label_to_index(label: str) -> tuple:
    """Parse a label like ``'ZZI'`` (``'1'`` is accepted for the identity)."""
    table = {"I": 0, "1": 0, "X": 1, "Y": 2, "Z": 3}
    try:
        return tuple(table[c] for c in label.upper())
    except KeyError as exc:
        raise ValueError(f"invalid Pauli letter in {label!r}") from exc


def pauli_matrix(alpha) -> np.ndarray:
    """Dense matrix of the Pauli string ``sigma_alpha`` (Kronecker product)."""
    alpha = _check_index(alpha)
    out = SIGMA_1Q[alpha[0]]
    for a in alpha[1:]:
        out = np.kron(out, SIGMA_1Q[a])
    return out


def string_action(alpha) -> tuple[int, np.ndarray]:
    """Column action of ``sigma_alpha`` as ``(flip, vals)``.

    The only nonzero entry in column ``j`` is ``sigma[j ^ flip, j] = vals[j]``.
    """
    alpha = _check_index(alpha)
    n = len(alpha)
    dim = 1 << n
    cols = np.arange(dim)
    flip = 0
    vals = np.ones(dim, dtype=complex)
    for site, a in enumerate(alpha):
        if a == 0:
            continue
        shift = n - 1 - site
        bit = (cols >> shift) & 1
        if a == 1:
            flip |= 1 << shift
        elif a == 2:
            flip |= 1 << shift
            vals = vals * (1j * (1 - 2 * bit))
        else:
            vals = vals * (1 - 2 * bit)
    return flip, vals


def expectation(rho: np.ndarray, alpha) -> float:
    """``tr(rho sigma_alpha)`` without materializing the Pauli string."""
    flip, vals = string_action(alpha)
    cols = np.arange(rho.shape[0])
    return float(np.dot(vals, rho[cols, cols ^ flip]).real)


def add_pauli(matrix: np.ndarray, alpha, coeff) -> None:
    """In-place ``matrix += coeff * sigma_alpha`` in ``O(2**n)``."""
    flip, vals = string_action(alpha)
    cols = np.arange(matrix.shape[0])
    matrix[cols ^ flip, cols] += coeff * vals


def basis_size(n: int, k: int) -> int:
    """Number of multi-indices with weight between 1 and ``k``."""
    return sum(comb(n, j) * 3**j for j in range(1, k + 1))


def enumerate_basis(n: int, k: int) -> list[tuple]:
    """All multi-indices with ``1 <= weight <= k`` in lexicographic order."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"system size must be in [1, {MAX_QUBITS}], got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"weight bound k={k} out of range [1, {n}]")
    out = []
    for j in range(1, k + 1):
        for sites in combinations(range(n), j):
            for letters in product((1, 2, 3), repeat=j):
                alpha = [0] * n
                for site, letter in zip(sites, letters):
                    alpha[site] = letter
                out.append(tuple(alpha))
    out.sort()
    return out


@dataclass
class BlochVector:
    """Real expectation values ``eta_alpha = tr(rho sigma_alpha)``."""

    n: int
    coeffs: dict

    def __getitem__(self, alpha):
        return self.coeffs[tuple(alpha)]

    def get(self, alpha, default=0.0):
        return self.coeffs.get(tuple(alpha), default)

    def items(self):
        return self.coeffs.items()


def bloch_from_state(rho: np.ndarray, cutoff: int | None = None) -> BlochVector:
    """Bloch coefficients of a state, optionally restricted to ``weight <= cutoff``."""
    n = num_qubits(rho.shape[0])
    trace = float(np.trace(rho).real)
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"state trace {trace} deviates from 1 beyond 1e-10")
    if cutoff is None:
        cutoff = n
    coeffs = {(0,) * n: 1.0}
    for alpha in enumerate_basis(n, cutoff):
        coeffs[alpha] = expectation(rho, alpha)
    return BlochVector(n=n, coeffs=coeffs)


def state_from_bloch(eta: BlochVector | dict, n: int | None = None) -> np.ndarray:
    """Operator ``(1/2**n) sum_alpha eta_alpha sigma_alpha``.

    Missing coefficients are treated as zero; the identity coefficient
    defaults to 1 and must equal 1 within 1e-10 if present.  Positivity of
    the result is not checked here.
    """
    if isinstance(eta, BlochVector):
        coeffs = eta.coeffs
        n = eta.n
    else:
        coeffs = {tuple(a): v for a, v in eta.items()}
        if n is None:
            n = len(next(iter(coeffs)))
    zero = (0,) * n
    eta0 = coeffs.get(zero, 1.0)
    if abs(eta0 - 1.0) > 1e-10:
        raise ValueError(f"identity coefficient must be 1, got {eta0}")
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    add_pauli(out, zero, 1.0)
    for alpha, value in coeffs.items():
        if alpha != zero and value != 0.0:
            add_pauli(out, alpha, value)
    return out / dim


def partial_trace(rho: np.ndarray, keep) -> np.ndarray:
    """Reduced state on the qubits in ``keep`` (0-based indices)."""
    n = num_qubits(rho.shape[0])
    keep = sorted({int(q) for q in keep})
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep indices {keep} out of range for {n} qubits")
    tensor = rho.reshape([2] * (2 * n))
    bra = list(range(n))
    ket = [i if i not in keep else n + i for i in range(n)]
    out = [i for i in keep] + [n + i for i in keep]
    reduced = np.einsum(tensor, bra + ket, out)
    d = 1 << len(keep)
    return np.ascontiguousarray(reduced.reshape(d, d))
