"""Gaussian-state metrology of a sinusoidally driven cavity field.

Covariance-matrix states, Bogoliubov/symplectic transforms (exact and
perturbative), two-mode Gaussian fidelity, quantum Fisher information, and
Cramer-Rao acceleration bounds for the driven-cavity accelerometer scenario.
"""

from .bogoliubov import (
    BogoliubovCoefficients,
    BogoliubovSeries,
    SymplecticTransform,
    assemble_symplectic,
    evaluate_series,
    m_block,
    transform_full_oracle,
    transform_reduced,
    trivial_series,
)
from .cavity import (
    CavityScenario,
    acceleration_from_h,
    build_scenario_series,
    h_from_acceleration,
    mode_frequency,
    sinusoidal_coefficients,
    static_first_order,
)
from .gaussian import (
    GaussianState,
    PhysicalityReport,
    SymplecticForm,
    check_physical,
    initial_product_squeezed,
    partial_trace,
    purity,
    symplectic_form,
    vacuum,
)
from .metrology import (
    EstimationResult,
    FidelityBreakdown,
    ModeSums,
    calibrate_phases,
    cramer_rao,
    fidelity_two_mode,
    mach_zehnder_bound,
    mach_zehnder_qfi,
    mode_sums,
    qfi_analytic_h0,
    qfi_numeric,
    validity_check,
)
from .policy import DEFAULT_POLICY, NumericPolicy, policy_from_env

__version__ = "0.1.0"

__all__ = [
    "BogoliubovCoefficients",
    "BogoliubovSeries",
    "CavityScenario",
    "DEFAULT_POLICY",
    "EstimationResult",
    "FidelityBreakdown",
    "GaussianState",
    "ModeSums",
    "NumericPolicy",
    "PhysicalityReport",
    "SymplecticForm",
    "SymplecticTransform",
    "acceleration_from_h",
    "assemble_symplectic",
    "build_scenario_series",
    "calibrate_phases",
    "check_physical",
    "cramer_rao",
    "evaluate_series",
    "fidelity_two_mode",
    "h_from_acceleration",
    "initial_product_squeezed",
    "m_block",
    "mach_zehnder_bound",
    "mach_zehnder_qfi",
    "mode_frequency",
    "mode_sums",
    "partial_trace",
    "policy_from_env",
    "purity",
    "qfi_analytic_h0",
    "qfi_numeric",
    "sinusoidal_coefficients",
    "static_first_order",
    "symplectic_form",
    "transform_full_oracle",
    "transform_reduced",
    "trivial_series",
    "vacuum",
    "validity_check",
]
