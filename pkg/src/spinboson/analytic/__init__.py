"""Closed-form thermodynamics of the three spin-boson models."""
from .dicke import (
    CriticalPoint,
    RatioResult,
    bound_coefficients,
    coeff_a,
    coeff_c,
    critical_beta,
    ratio_product,
    ratio_upper_bound,
    transition_condition,
)
from .intensity import IntensityCoefficients, IntensityRatio, c_zero_t, intensity_coeffs, intensity_zero_t_ratio
from .sigma_z import (
    EntropyBound,
    ZeroModePolicy,
    energy_sigma_z,
    entropy_positive_g2_bound,
    entropy_sigma_z,
    free_energy,
    free_entropy,
    free_lnz,
    lnz_shift_sigma_z,
    thermo_sigma_z,
)
