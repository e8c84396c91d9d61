"""Quantum Fisher information thermometry for a dissipatively coupled qubit probe.

The package models an N-level probe thermalizing under a detailed-balance
generator, computes the symmetric logarithmic derivative and the quantum
Fisher information for inverse-temperature estimation in closed form for the
qubit, decomposes the QFI into its population part plus the coherence gain,
and checks Cramer-Rao saturation of the binomial population estimator by
Monte Carlo.
"""

from .dynamics import (
    DensityMatrix,
    GadChannel,
    QubitInit,
    beta_from_thermal_ratio,
    coherence_decay_rate,
    evolve_state,
    gad_apply,
    gad_fixed_point,
    gad_kraus_operators,
    gad_master_comparison,
    gad_params,
    gad_stationary_diagnostic,
    gamma_from_tau_tilde,
    propagate_coherence,
    propagate_populations,
    propagation_method,
    qubit_relaxation_rate,
    qubit_state,
)
from .errors import (
    DomainError,
    EstimatorUndefinedError,
    ModelIntegrityError,
    NoStationaryStateError,
)
from .metrology import (
    CramerRaoReport,
    EstimationRun,
    MleResult,
    OptimalTime,
    QfiTrace,
    RegionLabel,
    Scenario,
    StateRanking,
    classical_fisher_information,
    classify_region,
    cramer_rao_report,
    maximize_qfi_over_time,
    mle_beta,
    optimize_initial_state,
    qfi_trace,
    simulate_measurements,
)
from .qfi import (
    DerivativeBundle,
    QfiResult,
    SldMatrix,
    beta_derivative_qubit,
    diagonal_qfi,
    finite_difference_state_derivative,
    qfi_decomposition,
    qfi_values,
    qubit_qfi,
    qubit_sld,
    sld_general,
    thermal_population_derivative,
    thermal_qfi,
)
from .spectrum import (
    Bath,
    RateMatrix,
    SpectralReport,
    Spectrum,
    ThermalDistribution,
    TransitionMatrix,
    rate_matrix,
    spectral_report,
    stationary_distribution,
    thermal_distribution,
    thermal_ratio,
    transition_matrix,
)
from .validate import CheckResult, check_names, run_checks

__version__ = "0.1.0"

__all__ = [
    "Bath",
    "CheckResult",
    "CramerRaoReport",
    "DensityMatrix",
    "DerivativeBundle",
    "DomainError",
    "EstimationRun",
    "EstimatorUndefinedError",
    "GadChannel",
    "MleResult",
    "ModelIntegrityError",
    "NoStationaryStateError",
    "OptimalTime",
    "QfiResult",
    "QfiTrace",
    "QubitInit",
    "RateMatrix",
    "RegionLabel",
    "Scenario",
    "SldMatrix",
    "SpectralReport",
    "Spectrum",
    "StateRanking",
    "ThermalDistribution",
    "TransitionMatrix",
    "beta_derivative_qubit",
    "beta_from_thermal_ratio",
    "check_names",
    "classical_fisher_information",
    "classify_region",
    "coherence_decay_rate",
    "cramer_rao_report",
    "diagonal_qfi",
    "evolve_state",
    "finite_difference_state_derivative",
    "gad_apply",
    "gad_fixed_point",
    "gad_kraus_operators",
    "gad_master_comparison",
    "gad_params",
    "gad_stationary_diagnostic",
    "gamma_from_tau_tilde",
    "maximize_qfi_over_time",
    "mle_beta",
    "optimize_initial_state",
    "propagate_coherence",
    "propagate_populations",
    "propagation_method",
    "qfi_decomposition",
    "qfi_trace",
    "qfi_values",
    "qubit_qfi",
    "qubit_relaxation_rate",
    "qubit_sld",
    "qubit_state",
    "rate_matrix",
    "run_checks",
    "simulate_measurements",
    "sld_general",
    "spectral_report",
    "stationary_distribution",
    "thermal_distribution",
    "thermal_population_derivative",
    "thermal_qfi",
    "thermal_ratio",
    "transition_matrix",
]
