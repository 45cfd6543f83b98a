"""Definite-property lattices, Born measures, and decoherence diagnostics.

The package decomposes finite-dimensional pure states over explicit
tensor factorizations, builds the Boolean lattices of definite-valued
projectors relative to a preferred observable or factorization, derives
and samples the associated probability measures, and probes their
robustness (compensating unitaries, imperfect environment records,
near-degenerate spectra).
"""

from .config import DEFAULT_TOLERANCES, Tolerances, tolerances_from_mapping
from .decoherence import (
    Branch,
    CrossTermReport,
    DecoherenceModel,
    TriorthogonalResult,
    cross_term_report,
    generate_decohered_state,
    predicted_overlap,
    triorthogonal_check,
)
from .envariance import (
    INVARIANCE_CONTRACT,
    UNITARITY_CONTRACT,
    EnvariancePair,
    TrialReport,
    compensator,
    degenerate_cluster_state,
    envariance_probability_check,
    invariance_defect,
    random_unitary,
    run_envariance_trials,
)
from .errors import ContractViolation, ValidationError
from .hilbert import (
    HermitianOperator,
    PureState,
    Subspace,
    eigenspaces,
    embed_factor,
    meet,
    ortho_complement,
    partial_trace,
    project_state,
    span,
    subspace_equal,
    tensor,
)
from .lattice import (
    BCVerdict,
    DefiniteLattice,
    ValueHomomorphism,
    bub_clifton_membership,
    check_valuation_laws,
    definite_lattice,
    degenerate_property_projectors,
    enumerate_homomorphisms,
    modal_lattice,
    orthodox_lattice,
    restrict_to_first_factor,
)
from .measure import (
    BornMeasure,
    ValueAssignment,
    additivity_check,
    born_measure,
    coarse_grain,
    phase_invariance_check,
    sample_assignment,
    sample_counts,
)
from .schmidt import (
    DegeneracyCluster,
    SchmidtDecomposition,
    decompose,
    reduced_purity_is_product,
)
from .stability import (
    StabilityProbe,
    SweepPoint,
    basis_rotation_angle,
    degeneracy_sweep,
    gap_state,
    largest_principal_angle,
    perturbation_unitary,
)

__version__ = "0.1.0"

__all__ = [
    "Tolerances", "DEFAULT_TOLERANCES", "tolerances_from_mapping",
    "ValidationError", "ContractViolation",
    "PureState", "HermitianOperator", "Subspace",
    "tensor", "partial_trace", "eigenspaces", "span", "meet",
    "ortho_complement", "subspace_equal", "project_state", "embed_factor",
    "DegeneracyCluster", "SchmidtDecomposition", "decompose",
    "reduced_purity_is_product",
    "DefiniteLattice", "ValueHomomorphism", "definite_lattice",
    "orthodox_lattice", "modal_lattice", "restrict_to_first_factor",
    "degenerate_property_projectors", "enumerate_homomorphisms",
    "check_valuation_laws", "BCVerdict", "bub_clifton_membership",
    "BornMeasure", "ValueAssignment", "born_measure", "coarse_grain",
    "additivity_check", "phase_invariance_check", "sample_assignment",
    "sample_counts",
    "EnvariancePair", "compensator", "degenerate_cluster_state",
    "invariance_defect", "envariance_probability_check", "random_unitary",
    "TrialReport", "run_envariance_trials",
    "INVARIANCE_CONTRACT", "UNITARITY_CONTRACT",
    "DecoherenceModel", "Branch", "CrossTermReport",
    "generate_decohered_state", "predicted_overlap", "cross_term_report",
    "TriorthogonalResult", "triorthogonal_check",
    "StabilityProbe", "SweepPoint", "basis_rotation_angle",
    "largest_principal_angle", "gap_state", "perturbation_unitary",
    "degeneracy_sweep",
]
