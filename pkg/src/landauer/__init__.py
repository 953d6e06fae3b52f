"""Entropy production ledgers and athermal temperatures for finite models.

The package computes, for a finite system-environment pair driven by a
joint unitary, the full bookkeeping behind Landauer-type bounds: entropy
changes, weighted charge flows against a generalized Gibbs reference, the
relative-entropy and mutual-information corrections that turn the classic
bound into an identity, and the nonnegative modified production obtained
by charging for initial athermality and correlations.  Temperature
estimators assign an inverse temperature to states that are not Gibbs,
and five benchmark scenarios exercise everything as parameter sweeps.
"""

from .core import (
    FactorShape,
    Observable,
    QuantumState,
    UnitaryOp,
    eigh,
    evolve,
    hamiltonian_propagator,
    partial_trace,
    tensor,
    unitary_from_hamiltonian,
)
from .thermo import (
    FlowRecord,
    ReferenceEnsemble,
    flows,
    generalized_gibbs,
    gibbs_state,
    log_partition,
    mutual_information,
    noneq_free_energy,
    relative_entropy,
    von_neumann_entropy,
)
from .temperature import (
    SpectrumDecomposition,
    TemperatureEstimate,
    cold_hot_temperature,
    decompose_spectrum,
    energy_matched_temperature,
    estimate,
    spectral_temperature,
)
from .bounds import (
    BoundLedger,
    FiniteTimeLedger,
    TrotterExpansion,
    WeakCouplingResult,
    finite_time_ledger,
    joint_hamiltonian,
    ledger,
    special_case_athermal_product,
    special_case_correlated_thermal,
    trotter_first_order,
    upper_bound_check,
    weak_coupling_bound,
)
from .sampling import (
    correlated_thermal_state,
    random_bound_instance,
    random_hermitian,
    random_pure_state,
    random_state,
    random_unitary,
)
from .experiments import (
    LeakageError,
    Scenario,
    SweepResult,
    SweepRow,
    calibrate_seed_beta,
    example1,
    example2,
    example3,
    example4,
    example5,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "FactorShape", "Observable", "QuantumState", "UnitaryOp",
    "eigh", "evolve", "hamiltonian_propagator", "partial_trace", "tensor",
    "unitary_from_hamiltonian",
    "FlowRecord", "ReferenceEnsemble", "flows", "generalized_gibbs",
    "gibbs_state", "log_partition", "mutual_information", "noneq_free_energy",
    "relative_entropy", "von_neumann_entropy",
    "SpectrumDecomposition", "TemperatureEstimate", "cold_hot_temperature",
    "decompose_spectrum", "energy_matched_temperature", "estimate",
    "spectral_temperature",
    "BoundLedger", "FiniteTimeLedger", "TrotterExpansion", "WeakCouplingResult",
    "finite_time_ledger", "joint_hamiltonian", "ledger",
    "special_case_athermal_product", "special_case_correlated_thermal",
    "trotter_first_order", "upper_bound_check", "weak_coupling_bound",
    "correlated_thermal_state", "random_bound_instance", "random_hermitian",
    "random_pure_state", "random_state", "random_unitary",
    "LeakageError", "Scenario", "SweepResult", "SweepRow",
    "calibrate_seed_beta", "example1", "example2", "example3", "example4",
    "example5", "run_sweep",
    "__version__",
]
