"""Finite symmetry groups of Pauli Hamiltonians and symmetry-reduced bases.

Two generator kinds are supported: qubit permutations and conjugation by a
Pauli string.  Both map a Pauli string to plus or minus another Pauli
string, so group orbits can be averaged with exact integer sign
bookkeeping.  Averaging all weight-limited strings over a group yields an
orthogonal basis of the invariant Hamiltonian subspace; projecting a
group-invariant state over that reduced basis gives the same result as
the unreduced projection at a fraction of the cost.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from math import sqrt
from typing import NamedTuple

import numpy as np

from .pauli import enumerate_basis, index_label, label_to_index, num_qubits, pauli_matrix, string_action

GROUP_CAP = 4096


class GroupTooLargeError(RuntimeError):
    """Generated group exceeded the configured element cap."""


@dataclass(frozen=True)
class QubitPermutation:
    """Relabeling of qubits; ``perm[i]`` is the image of qubit ``i`` (0-based)."""

    perm: tuple

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        object.__setattr__(self, "perm", perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"not a permutation of 0..{len(perm) - 1}: {perm}")


@dataclass(frozen=True)
class PauliConjugation:
    """Conjugation by the Pauli string ``sigma_beta``."""

    index: tuple

    def __post_init__(self):
        object.__setattr__(self, "index", tuple(int(a) for a in self.index))


class SignedIndex(NamedTuple):
    index: tuple
    sign: int


def _comm_sign(a: int, b: int) -> int:
    return 1 if a == 0 or b == 0 or a == b else -1


def _permute_index(perm: tuple, alpha: tuple) -> tuple:
    out = [0] * len(alpha)
    for i, a in enumerate(alpha):
        out[perm[i]] = a
    return tuple(out)


def conjugate_index(generator, alpha) -> SignedIndex:
    """Image of ``sigma_alpha`` under conjugation by a single generator."""
    alpha = tuple(alpha)
    if isinstance(generator, QubitPermutation):
        if len(generator.perm) != len(alpha):
            raise ValueError("permutation size does not match index size")
        return SignedIndex(_permute_index(generator.perm, alpha), 1)
    if isinstance(generator, PauliConjugation):
        beta = generator.index
        if len(beta) != len(alpha):
            raise ValueError("Pauli generator size does not match index size")
        sign = 1
        for a, b in zip(alpha, beta):
            sign *= _comm_sign(b, a)
        return SignedIndex(alpha, sign)
    raise TypeError(f"unknown generator type {type(generator).__name__}")


@dataclass(frozen=True)
class GroupElement:
    """Canonical form ``U_perm P_pauli`` of a symmetry-group element.

    Phases of Pauli-string products are dropped: they cancel in the
    conjugation action, which is all the element is used for.
    """

    perm: tuple
    pauli: tuple

    def apply(self, alpha: tuple) -> SignedIndex:
        sign = 1
        for a, b in zip(alpha, self.pauli):
            sign *= _comm_sign(b, a)
        return SignedIndex(_permute_index(self.perm, alpha), sign)


def _as_element(generator, n: int) -> GroupElement:
    identity_perm = tuple(range(n))
    if isinstance(generator, QubitPermutation):
        if len(generator.perm) != n:
            raise ValueError("permutation size does not match system size")
        return GroupElement(generator.perm, (0,) * n)
    if isinstance(generator, PauliConjugation):
        if len(generator.index) != n:
            raise ValueError("Pauli generator size does not match system size")
        return GroupElement(identity_perm, generator.index)
    raise TypeError(f"unknown generator type {type(generator).__name__}")


def _compose(g2: GroupElement, g1: GroupElement) -> GroupElement:
    perm = tuple(g2.perm[p] for p in g1.perm)
    pulled = tuple(g2.pauli[g1.perm[i]] for i in range(len(g1.perm)))
    pauli = tuple(a ^ b for a, b in zip(pulled, g1.pauli))
    return GroupElement(perm, pauli)


@dataclass
class SymmetryGroup:
    n: int
    generators: list
    elements: list

    def __len__(self):
        return len(self.elements)


def generate_group(generators, n: int | None = None, cap: int = GROUP_CAP) -> SymmetryGroup:
    """Closure of the generators under composition, identity included."""
    generators = list(generators)
    if n is None:
        if not generators:
            raise ValueError("cannot infer system size from an empty generator list")
        g = generators[0]
        n = len(g.perm) if isinstance(g, QubitPermutation) else len(g.index)
    if cap < 1:
        raise ValueError("group cap must be at least 1")
    identity = GroupElement(tuple(range(n)), (0,) * n)
    gen_elements = [_as_element(g, n) for g in generators]
    elements = {identity}
    frontier = [identity]
    while frontier:
        new = []
        for g in frontier:
            for h in gen_elements:
                c = _compose(h, g)
                if c not in elements:
                    elements.add(c)
                    new.append(c)
                    if len(elements) > cap:
                        raise GroupTooLargeError(
                            f"symmetry group exceeds cap of {cap} elements"
                        )
        frontier = new
    ordered = sorted(elements, key=lambda e: (e.perm, e.pauli))
    return SymmetryGroup(n=n, generators=generators, elements=ordered)


@dataclass
class OrbitElement:
    """Normalized signed sum of one group orbit of Pauli strings.

    ``(1/sqrt(m)) * sum_j signs[j] * sigma_{indices[j]}``, normalized so
    that its squared trace norm matches a single Pauli string (2**n).
    """

    n: int
    indices: tuple
    signs: tuple
    _matrix: np.ndarray | None = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.indices)

    @property
    def weight(self) -> int:
        return sum(1 for a in self.indices[0] if a)

    @property
    def label(self) -> str:
        head = index_label(self.indices[0])
        return head if self.size == 1 else f"{head}(+{self.size - 1})"

    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            dim = 1 << self.n
            out = np.zeros((dim, dim), dtype=complex)
            for alpha, sign in zip(self.indices, self.signs):
                flip, vals = string_action(alpha)
                cols = np.arange(dim)
                out[cols ^ flip, cols] += sign * vals
            self._matrix = out / sqrt(self.size)
        return self._matrix

    def expectation(self, rho: np.ndarray) -> float:
        cols = np.arange(rho.shape[0])
        total = 0.0
        for alpha, sign in zip(self.indices, self.signs):
            flip, vals = string_action(alpha)
            total += sign * np.dot(vals, rho[cols, cols ^ flip]).real
        return float(total / sqrt(self.size))


@dataclass
class InvariantBasis:
    """Orthogonal basis of the group-invariant weight-limited Hamiltonian space."""

    n: int
    k: int
    elements: list
    group: SymmetryGroup

    def __len__(self):
        return len(self.elements)

    @property
    def labels(self) -> list:
        return [e.label for e in self.elements]


def invariant_basis(n: int, k: int, group: SymmetryGroup) -> InvariantBasis:
    """Orbit-average every weight-``<=k`` Pauli string over the group.

    Orbits whose average vanishes by sign cancellation are discarded; the
    decision is exact because signs are integers.
    """
    if group.n != n:
        raise ValueError(f"group acts on {group.n} qubits, basis requested for {n}")
    seen = set()
    elements = []
    for alpha in enumerate_basis(n, k):
        if alpha in seen:
            continue
        acc = defaultdict(int)
        for g in group.elements:
            beta, sign = g.apply(alpha)
            acc[beta] += sign
        seen.update(acc.keys())
        if acc[alpha] == 0:
            continue
        members = sorted(beta for beta, c in acc.items() if c != 0)
        signs = [1 if acc[beta] > 0 else -1 for beta in members]
        if signs[0] < 0:
            signs = [-s for s in signs]
        elements.append(OrbitElement(n=n, indices=tuple(members), signs=tuple(signs)))
    return InvariantBasis(n=n, k=k, elements=elements, group=group)


def permutation_unitary(perm: tuple, n: int | None = None) -> np.ndarray:
    """Unitary that moves qubit ``i`` to position ``perm[i]``."""
    if n is None:
        n = len(perm)
    dim = 1 << n
    matrix = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        out = 0
        for i in range(n):
            bit = (j >> (n - 1 - i)) & 1
            out |= bit << (n - 1 - perm[i])
        matrix[out, j] = 1.0
    return matrix


def generator_unitary(generator, n: int) -> np.ndarray:
    """Dense unitary of a single generator."""
    if isinstance(generator, QubitPermutation):
        return permutation_unitary(generator.perm, n)
    if isinstance(generator, PauliConjugation):
        return pauli_matrix(generator.index)
    raise TypeError(f"unknown generator type {type(generator).__name__}")


def is_invariant_state(rho: np.ndarray, group_or_generators, tol: float = 1e-9) -> bool:
    """Check ``U rho U^dag = rho`` (max-norm, per generator)."""
    n = num_qubits(rho.shape[0])
    if isinstance(group_or_generators, SymmetryGroup):
        generators = group_or_generators.generators
    else:
        generators = list(group_or_generators)
    for g in generators:
        u = generator_unitary(g, n)
        if np.abs(u @ rho @ u.conj().T - rho).max() > tol:
            return False
    return True


def auto_permutation_generators(rho: np.ndarray, tol: float = 1e-9) -> list:
    """Adjacent transpositions if the state is fully permutation symmetric, else []."""
    n = num_qubits(rho.shape[0])
    generators = []
    for i in range(n - 1):
        perm = list(range(n))
        perm[i], perm[i + 1] = perm[i + 1], perm[i]
        generators.append(QubitPermutation(tuple(perm)))
    if is_invariant_state(rho, generators, tol=tol):
        return generators
    return []


def parse_symmetry_spec(spec: dict, n: int) -> list:
    """Parse the JSON symmetry spec into a generator list.

    Format: ``{"permutations": [[1, 0, 2], ...], "pauli": ["ZZI", ...]}``
    with 0-based permutation images and I/X/Y/Z letters ('1' also accepted
    for the identity).
    """
    if not isinstance(spec, dict):
        raise ValueError("symmetry spec must be a JSON object")
    unknown = set(spec) - {"permutations", "pauli"}
    if unknown:
        raise ValueError(f"unknown symmetry spec fields: {sorted(unknown)}")
    generators = []
    for perm in spec.get("permutations", []):
        if len(perm) != n:
            raise ValueError(f"permutation {perm} does not match system size {n}")
        generators.append(QubitPermutation(tuple(perm)))
    for label in spec.get("pauli", []):
        index = label_to_index(label)
        if len(index) != n:
            raise ValueError(f"Pauli string {label!r} does not match system size {n}")
        generators.append(PauliConjugation(index))
    return generators
