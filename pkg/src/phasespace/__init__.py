"""Finite-field phase space: Wigner functions, mutually unbiased bases and tomography."""

__version__ = "0.1.0"

from .displacement import (
    DisplacementIndex,
    PhaseConvention,
    all_displacements,
    canonical_conventions,
    displacement,
    partition_families,
)
from .errors import PhaseSpaceError, UsageError, VerificationError
from .factor import crt_factor_check, factor_odd_bipartite, scan_three_qubit_products, scan_two_qubit_products
from .fields import FieldTables, build_field, build_quadratic_extension
from .tomography import (
    POVM,
    BlochVector,
    bloch_from_sic,
    product_sic_two_qubit,
    pvm_mub_tomography,
    redundancy_ledger,
    sample_and_estimate,
    sic_povm_qubit,
    sic_probabilities,
    sic_unitary_qubit,
)
from .wigner import (
    WignerFamily,
    build_wigner_family,
    mean_king_infer,
    mubs_from_wigner,
    verify_acceptability,
    wigner_distribution,
)

__all__ = [
    "__version__",
    "BlochVector",
    "DisplacementIndex",
    "FieldTables",
    "POVM",
    "PhaseConvention",
    "PhaseSpaceError",
    "UsageError",
    "VerificationError",
    "WignerFamily",
    "all_displacements",
    "bloch_from_sic",
    "build_field",
    "build_quadratic_extension",
    "build_wigner_family",
    "canonical_conventions",
    "crt_factor_check",
    "displacement",
    "factor_odd_bipartite",
    "mean_king_infer",
    "mubs_from_wigner",
    "partition_families",
    "product_sic_two_qubit",
    "pvm_mub_tomography",
    "redundancy_ledger",
    "sample_and_estimate",
    "scan_three_qubit_products",
    "scan_two_qubit_products",
    "sic_povm_qubit",
    "sic_probabilities",
    "sic_unitary_qubit",
    "verify_acceptability",
    "wigner_distribution",
]
