"""Dicke model with intensity-dependent rotating coupling.

Only the zero-temperature ratio has a closed form: there the rotating
coefficients a(omega), d(omega) vanish and Z/Z0 = prod_w (1 - c(w))^-1 with
c(w) = g2^2 / ((Omega + i w)(omega0 - i w)). The finite-temperature integral is
non-Gaussian and is deliberately left unevaluated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import polygamma

from ..errors import DomainError, SuperradiantRegime
from ..model import ModelParams, is_zero_t


@dataclass(frozen=True)
class IntensityCoefficients:
    omega: float
    a: complex
    c: complex
    d: complex
    b0_magnitude: float


def intensity_coeffs(omega: float, params: ModelParams, b0_magnitude: float = 0.0) -> IntensityCoefficients:
    """a, c, d at bosonic frequency ``omega``.

    At zero temperature the pi/(beta omega0) prefactors send a and d to zero.
    ``b0_magnitude`` is only carried along for report assembly.
    """
    if b0_magnitude < 0:
        raise DomainError("b0_magnitude", "b0_magnitude must be >= 0")
    W, w0 = params.omega_big, params.omega0
    t = params.tanh_factor
    c = params.g2**2 * t / ((W + 1j * omega) * (w0 - 1j * omega))
    if is_zero_t(params.beta):
        a = 0j
        d = 0j
    else:
        scale = math.pi / (params.beta * w0)
        a = scale * params.g1**2 * t / ((W - 1j * omega) * (w0 - 1j * omega))
        d = params.g1 * params.g2 * math.sqrt(scale) * t / ((W + 1j * omega) * math.sqrt(w0**2 + omega**2))
    return IntensityCoefficients(float(omega), complex(a), complex(c), complex(d), float(b0_magnitude))


def c_zero_t(omega, params: ModelParams):
    """Low-temperature limit of c(omega): g2^2 / ((Omega + i w)(omega0 - i w))."""
    w = np.asarray(omega, dtype=float)
    return params.g2**2 / ((params.omega_big + 1j * w) * (params.omega0 - 1j * w))


@dataclass
class IntensityRatio:
    value: float
    ln_value: float
    zero_mode_factor: float
    critical: bool
    M: int
    grid_beta: float
    tail: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


#: |g2 - sqrt(Omega omega0)| (relative to max(1, g_c)) or |1 - c(0)| at or below this flags criticality
CRITICAL_TOL = 1e-9


def intensity_zero_t_ratio(params: ModelParams, M: int = 10_000, grid_beta: float | None = None,
                           tol: float = CRITICAL_TOL) -> IntensityRatio:
    """Zero-temperature Z/Z0 = prod_w (1 - c(w))^-1 on the Matsubara grid of ``grid_beta``.

    The frequencies still need a spacing 2 pi / grid_beta. It defaults to the
    finite beta in ``params`` (the low-temperature asymptotic form) and to
    2 pi when ``params`` carries the zero-T marker. The product pairs w with
    -w, giving |1 - c(w)|^2; factors beyond M use Re c ~ g2^2 / w^2.
    """
    if grid_beta is None:
        grid_beta = 2 * np.pi if is_zero_t(params.beta) else params.beta
    if not (grid_beta > 0 and math.isfinite(grid_beta)):
        raise DomainError("grid_beta", f"grid_beta must be finite and > 0, got {grid_beta}")
    margin = 1.0 - params.g2**2 / (params.omega_big * params.omega0)
    g_c = intensity_critical_coupling(params)
    critical = abs(params.g2 - g_c) <= tol * max(1.0, g_c) or abs(margin) <= tol
    if margin < 0 and not critical:
        raise SuperradiantRegime(
            f"g2^2 = {params.g2**2!r} exceeds Omega omega0; the zero-mode factor is negative",
            factor="zero_mode",
            condition=1.0 - margin,
        )
    n = np.arange(1, M + 1)
    w = 2 * np.pi * n / grid_beta
    pair = np.abs(1.0 - c_zero_t(w, params)) ** 2
    tail = 2.0 * params.g2**2 * (grid_beta / (2 * np.pi)) ** 2 * float(polygamma(1, M + 1))
    ln_rest = -math.fsum(np.log(pair)) + tail

    if margin <= 0:
        return IntensityRatio(math.inf, math.inf, math.inf, True, M, float(grid_beta), tail)
    zero_factor = 1.0 / margin
    ln_value = math.log(zero_factor) + ln_rest
    return IntensityRatio(
        value=math.exp(ln_value) if ln_value < 709 else math.inf,
        ln_value=ln_value,
        zero_mode_factor=zero_factor,
        critical=critical,
        M=M,
        grid_beta=float(grid_beta),
        tail=tail,
    )


def intensity_critical_coupling(params: ModelParams) -> float:
    return math.sqrt(params.omega_big * params.omega0)
