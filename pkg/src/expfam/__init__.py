"""Information projections onto exponential families of k-local thermal states.

Given an n-qubit density matrix, the package finds the closest thermal
state (in quantum relative entropy) whose Hamiltonian contains at most
k-party interaction terms, and derives from the resulting distances D_k
the irreducible k-party interaction measures C_k.  Two independent
numerical routes are provided: an iterative moment-matching sweep and a
convex dual descent; closed forms cover the product (k = 1) case and
finite symmetry groups shrink the parameter space.
"""

from .dual import DualState, dual_objective, minimize_dual
from .estimators import ComplexityMeasures, ExponentialFamilyProjection, check_density_matrix
from .linalg import (
    SingularSupportError,
    SpectralDecomposition,
    eig_hermitian,
    free_energy,
    matrix_exp_hermitian,
    matrix_log_psd,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)
from .measures import (
    DistanceResult,
    MeasureReport,
    d1_un_invariant,
    distance,
    interaction_ladder,
    multi_information,
)
from .pauli import (
    BlochVector,
    bloch_from_state,
    enumerate_basis,
    expectation,
    index_label,
    label_to_index,
    partial_trace,
    pauli_matrix,
    state_from_bloch,
    weight,
)
from .projection import (
    ProjectionConfig,
    ProjectionResult,
    epsilon_step,
    project,
    project_product,
)
from .states import (
    StateValidationError,
    dicke,
    ghz,
    maximally_mixed,
    random_state,
    state_from_spec,
    validate_state,
    werner,
    white_noise_mix,
)
from .symmetry import (
    GroupTooLargeError,
    InvariantBasis,
    PauliConjugation,
    QubitPermutation,
    SignedIndex,
    SymmetryGroup,
    auto_permutation_generators,
    conjugate_index,
    generate_group,
    invariant_basis,
    is_invariant_state,
)

__version__ = "0.1.0"

__all__ = [
    "BlochVector",
    "ComplexityMeasures",
    "DistanceResult",
    "DualState",
    "ExponentialFamilyProjection",
    "GroupTooLargeError",
    "InvariantBasis",
    "MeasureReport",
    "PauliConjugation",
    "ProjectionConfig",
    "ProjectionResult",
    "QubitPermutation",
    "SignedIndex",
    "SingularSupportError",
    "SpectralDecomposition",
    "StateValidationError",
    "SymmetryGroup",
    "auto_permutation_generators",
    "bloch_from_state",
    "check_density_matrix",
    "conjugate_index",
    "d1_un_invariant",
    "dicke",
    "distance",
    "dual_objective",
    "eig_hermitian",
    "enumerate_basis",
    "epsilon_step",
    "expectation",
    "free_energy",
    "generate_group",
    "ghz",
    "index_label",
    "interaction_ladder",
    "invariant_basis",
    "is_invariant_state",
    "label_to_index",
    "matrix_exp_hermitian",
    "matrix_log_psd",
    "maximally_mixed",
    "minimize_dual",
    "multi_information",
    "partial_trace",
    "pauli_matrix",
    "project",
    "project_product",
    "random_state",
    "relative_entropy",
    "state_from_bloch",
    "state_from_spec",
    "trace_distance",
    "validate_state",
    "von_neumann_entropy",
    "weight",
    "werner",
    "white_noise_mix",
]
