"""Numerical toolkit for pairs of commuting isometries.

Model pairs by finite unitary/projection triples or truncated structured
matrices, compute defect operators and cross-commutators, verify the rank
and eigenvalue-symmetry identities, build the irreducible model pairs, and
extract the complete unitary invariant of the compact-normal class.
"""

from .bcl import (
    BCLTriple,
    ToeplitzSymbols,
    TripleValidation,
    WanderingOperators,
    cross_commutator_on_wandering,
    random_triple,
    toeplitz_symbols,
    validate_triple,
    wandering_projections,
)
from .classify import (
    BlockDescriptor,
    ClassificationResult,
    EquivalenceVerdict,
    NormalityReport,
    ShiftUnitaryInvariant,
    check_compact_normal,
    classify,
    decide_equivalence,
    e1_data,
    fundamental_sequence,
    shift_unitary_invariant,
)
from .izuchi import (
    CanonicalBasis3,
    IzuchiModel,
    IzuchiReport,
    build_izuchi_model,
    canonical_basis_3finite,
    verify_izuchi_invariants,
)
from .linalg import (
    Subspace,
    hermitian_eig,
    numerical_rank,
    random_unitary,
    subspace_intersection,
)
from .models import (
    StructuredPair,
    bishift_truncated,
    cross_on_interior,
    defect_and_cross_on_interior,
    defect_on_interior,
    direct_sum,
    scramble,
    twisted_shift,
    validate_pair,
)
from .spectral import (
    DiffProjCanonicalForm,
    RankFormulaReport,
    SpectralProfile,
    SymmetryReport,
    build_difference_projections,
    check_rank_formula,
    eigen_symmetry_check,
    spectral_profile,
)
from .toeplitz import (
    TruncatedToeplitzPair,
    build_truncated_pair,
    degree_zero_block,
    oracle_cross_and_defect,
)

__version__ = "0.1.0"

__all__ = [
    "BCLTriple",
    "BlockDescriptor",
    "CanonicalBasis3",
    "ClassificationResult",
    "DiffProjCanonicalForm",
    "EquivalenceVerdict",
    "IzuchiModel",
    "IzuchiReport",
    "NormalityReport",
    "RankFormulaReport",
    "ShiftUnitaryInvariant",
    "SpectralProfile",
    "StructuredPair",
    "Subspace",
    "SymmetryReport",
    "ToeplitzSymbols",
    "TripleValidation",
    "TruncatedToeplitzPair",
    "WanderingOperators",
    "bishift_truncated",
    "build_difference_projections",
    "build_izuchi_model",
    "build_truncated_pair",
    "canonical_basis_3finite",
    "check_compact_normal",
    "check_rank_formula",
    "classify",
    "cross_commutator_on_wandering",
    "cross_on_interior",
    "decide_equivalence",
    "defect_and_cross_on_interior",
    "defect_on_interior",
    "degree_zero_block",
    "direct_sum",
    "e1_data",
    "eigen_symmetry_check",
    "fundamental_sequence",
    "hermitian_eig",
    "numerical_rank",
    "oracle_cross_and_defect",
    "random_triple",
    "random_unitary",
    "scramble",
    "shift_unitary_invariant",
    "spectral_profile",
    "subspace_intersection",
    "toeplitz_symbols",
    "twisted_shift",
    "validate_pair",
    "validate_triple",
    "verify_izuchi_invariants",
    "wandering_projections",
]
