"""Truncated Pauli-path estimation of noisy circuit mean values."""

from .pauli import (
    PHASE_I,
    PHASE_MINUS_I,
    PHASE_MINUS_ONE,
    PHASE_ONE,
    PauliWord,
    Phase,
    PhasedPauli,
    basis_matrix_element,
    commutes,
    multiply,
)
from .circuit import (
    Circuit,
    CircuitFormatError,
    CliffordGate,
    Layer,
    RotationGate,
    circuit_from_dict,
    circuit_generation_certified,
    circuit_to_dict,
    clifford_conjugate,
    effected_words,
    generation_check,
    gf2_rank,
    symplectic_vector,
    validate,
)
from .observables import (
    Hamiltonian,
    NormBound,
    ObservableFormatError,
    SparseDensity,
    hamiltonian_from_dict,
    hamiltonian_to_dict,
    norm_bound,
    overlap,
    state_from_dict,
    state_to_dict,
)
from .engine import (
    EnumerationStats,
    FactorAtom,
    PathEnumeration,
    PauliPath,
    ResourceLimitError,
    WeightBudget,
    enumerate_paths,
    enumeration_stats,
    layer_predecessors,
    rotation_predecessors,
)
from .estimator import (
    CrossTermResult,
    EstimateReport,
    MSelection,
    MseBenchmarkReport,
    NoiseModel,
    choose_m,
    cross_term_check,
    damping,
    describe_factors,
    estimate,
    mse_benchmark,
    path_value,
)
from .oracle import (
    OracleCapError,
    noiseless_mean_value,
    noisy_mean_value,
)
from .benchmarks import rx_chain_exact_value, rx_chain_instance, scaling_sweep

__version__ = "0.1.0"
