"""Achievable-rate frontiers for quantum broadcast channels.

Core pieces: labeled density matrices and entropy (states), broadcast channels
with isometric extensions and degrading-map search (channels), entropic
functionals (quantities), optimized frontier sweeps (regions), exhaustive grid
references (bruteforce), JSON documents (specio), and a CLI (cli).
"""

from .bruteforce import (
    CardinalityReport,
    cardinality_probe,
    classical_degraded_region,
    composition_count,
    compositions,
    grid_cq_frontier,
    mesh_tolerance,
)
from .channels import (
    BroadcastChannel,
    CqBroadcastChannel,
    DegradednessReport,
    DephasingSpec,
    IsometricExtension,
    KrausChannel,
    complementary,
    completely_dephase,
    degradedness_residual,
    isometric_extension,
    make_bsc_cascade,
    make_classical_cascade,
    make_completely_dephasing,
    make_constant_cq,
    make_generalized_dephasing,
    make_ghz_copy,
    make_identity_channel,
    make_noiseless_bit,
    make_pinching,
    make_pinching_cq,
)
from .errors import BudgetError, ValidationError
from .optimize import OptimizerConfig, maximize_batch, seeded_rng
from .quantities import (
    channel_coherent_information,
    coherent_information,
    conditional_entropy,
    conditional_mutual_information,
    holevo_information,
    mutual_information,
)
from .regions import (
    CqCertification,
    Frontier,
    IndependentRates,
    MergingRates,
    RatePoint,
    build_evaluator,
    certify_single_letter_cq,
    cq_broadcast_frontier,
    cq_entanglement_frontier,
    dephasing_cq_frontier,
    evaluate_witness,
    independent_rates,
    merging_rates,
    pinching_boundary,
    qq_frontier,
)
from .specio import (
    BUILTIN_CHANNELS,
    parse_channel_spec,
    parse_state_spec,
    serialize_channel,
    serialize_state,
)
from .states import (
    CqState,
    DensityMatrix,
    PureState,
    SystemLayout,
    basis_state,
    binary_entropy,
    fidelity,
    layout,
    maximally_entangled,
    partial_trace,
    purify,
    random_density_matrix,
    random_pure_state,
    tensor_product,
    trace_distance,
    von_neumann_entropy,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_CHANNELS",
    "BroadcastChannel",
    "BudgetError",
    "CardinalityReport",
    "CqBroadcastChannel",
    "CqCertification",
    "CqState",
    "DegradednessReport",
    "DensityMatrix",
    "DephasingSpec",
    "Frontier",
    "IndependentRates",
    "IsometricExtension",
    "KrausChannel",
    "MergingRates",
    "OptimizerConfig",
    "PureState",
    "RatePoint",
    "SystemLayout",
    "ValidationError",
    "basis_state",
    "binary_entropy",
    "build_evaluator",
    "cardinality_probe",
    "certify_single_letter_cq",
    "channel_coherent_information",
    "classical_degraded_region",
    "coherent_information",
    "complementary",
    "completely_dephase",
    "composition_count",
    "compositions",
    "conditional_entropy",
    "conditional_mutual_information",
    "cq_broadcast_frontier",
    "cq_entanglement_frontier",
    "degradedness_residual",
    "dephasing_cq_frontier",
    "evaluate_witness",
    "fidelity",
    "grid_cq_frontier",
    "holevo_information",
    "independent_rates",
    "isometric_extension",
    "layout",
    "make_bsc_cascade",
    "make_classical_cascade",
    "make_completely_dephasing",
    "make_constant_cq",
    "make_generalized_dephasing",
    "make_ghz_copy",
    "make_identity_channel",
    "make_noiseless_bit",
    "make_pinching",
    "make_pinching_cq",
    "maximally_entangled",
    "maximize_batch",
    "merging_rates",
    "mesh_tolerance",
    "mutual_information",
    "parse_channel_spec",
    "parse_state_spec",
    "partial_trace",
    "pinching_boundary",
    "purify",
    "qq_frontier",
    "random_density_matrix",
    "random_pure_state",
    "seeded_rng",
    "serialize_channel",
    "serialize_state",
    "tensor_product",
    "trace_distance",
    "von_neumann_entropy",
]
