"""Generalized Dicke model: coupling coefficients, critical temperature, Z/Z0.

g1 couples the rotating terms and g2 the counter-rotating ones. Every
thermal factor enters through tanh(beta Omega / 4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import polygamma

from ..errors import DomainError, SuperradiantRegime
from ..matsubara import bound_kernel_sum, lorentzian_fermi_sum
from ..model import ModelParams, require_finite_beta

#: relative tolerance on (g1+g2)^2 = Omega omega0 for the quantum critical point
QCP_RTOL = 1e-12

FINITE = "finite"
NONE = "none"
QUANTUM_CRITICAL = "quantum_critical"


def coeff_a(omega, params: ModelParams):
    """a(omega) = [g1^2/(Omega - i w) + g2^2/(Omega + i w)] / (omega0 - i w) * tanh(beta Omega/4)."""
    w = np.asarray(omega, dtype=float)
    W, w0 = params.omega_big, params.omega0
    val = (params.g1**2 / (W - 1j * w) + params.g2**2 / (W + 1j * w)) / (w0 - 1j * w)
    return val * params.tanh_factor


def coeff_c(omega, params: ModelParams):
    """c(omega) = g1 g2 Omega / [sqrt(omega0^2 + w^2) (Omega^2 + w^2)] * tanh(beta Omega/4)."""
    w = np.asarray(omega, dtype=float)
    W, w0 = params.omega_big, params.omega0
    return params.g1 * params.g2 * W / (np.sqrt(w0**2 + w**2) * (W**2 + w**2)) * params.tanh_factor


def transition_condition(params: ModelParams) -> float:
    """a0(0) + 2 c0(0) = (g1+g2)^2/(Omega omega0) * tanh(beta Omega/4); the transition sits at 1."""
    return (params.g1 + params.g2) ** 2 / (params.omega_big * params.omega0) * params.tanh_factor


@dataclass(frozen=True)
class CriticalPoint:
    """``status`` is "finite" (beta_c set), "none" or "quantum_critical"."""

    status: str
    beta_c: float | None
    coupling_at_zero_T: float
    which_condition: str

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "beta_c": self.beta_c,
            "coupling_at_zero_T": self.coupling_at_zero_T,
            "which_condition": self.which_condition,
        }


def critical_beta(params: ModelParams) -> CriticalPoint:
    """beta_c = (4/Omega) artanh(Omega omega0 / (g1+g2)^2) when (g1+g2)^2 > Omega omega0."""
    s2 = (params.g1 + params.g2) ** 2
    ww = params.omega_big * params.omega0
    threshold = math.sqrt(ww)
    if abs(s2 - ww) <= QCP_RTOL * ww:
        return CriticalPoint(QUANTUM_CRITICAL, None, threshold, "quantum")
    if s2 < ww:
        return CriticalPoint(NONE, None, threshold, "thermal")
    beta_c = 4.0 / params.omega_big * math.atanh(ww / s2)
    return CriticalPoint(FINITE, beta_c, threshold, "thermal")


@dataclass
class RatioResult:
    """Z/Z0 from a truncated Matsubara product plus an analytic tail."""

    value: float
    ln_value: float
    zero_mode_factor: float
    condition: float
    M: int
    tail: float
    tail_error_estimate: float
    near_divergence: bool
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "ln_value": self.ln_value,
            "zero_mode_factor": self.zero_mode_factor,
            "condition": self.condition,
            "M": self.M,
            "tail": self.tail,
            "tail_error_estimate": self.tail_error_estimate,
            "near_divergence": self.near_divergence,
            **self.metadata,
        }


#: 1 - condition below this sets ``near_divergence``
DIVERGENCE_MARGIN = 1e-9


def _require_normal_phase(params: ModelParams, condition: float):
    if condition >= 1.0:
        raise SuperradiantRegime(
            f"a(0)+2c(0) = {condition!r} >= 1: normal-phase product diverges at the zero mode",
            factor="zero_mode",
            condition=condition,
        )


def _inv_square_bosonic_tail(beta, M):
    """sum_{n > M} 1/omega_n^2, omega_n = 2 pi n / beta."""
    return (beta / (2 * np.pi)) ** 2 * float(polygamma(1, M + 1))


def _inv_quartic_bosonic_tail(beta, M):
    return (beta / (2 * np.pi)) ** 4 * float(polygamma(3, M + 1)) / 6.0


def ratio_product(params: ModelParams, M: int = 10_000) -> RatioResult:
    """Normal-phase Z/Z0 as the zero-mode factor times prod_{w>0} [(1-a(w))(1-a(-w)) - c(w)^2]^-1.

    The factors with n > M are summed in log form from the 1/omega^2 asymptote
    of Re a(omega) = t (g2^2 - g1^2)/omega^2 + O(omega^-4).
    """
    beta = require_finite_beta(params, "ratio_product")
    if M < 1:
        raise DomainError("M", "M must be >= 1")
    cond = transition_condition(params)
    _require_normal_phase(params, cond)

    a0 = float(coeff_a(0.0, params).real)
    c0 = float(coeff_c(0.0, params))
    zero_arg = (1.0 - a0 + 2.0 * c0) * (1.0 - a0 - 2.0 * c0)
    ln_zero = -0.5 * math.log(zero_arg)

    n = np.arange(1, M + 1)
    w = 2 * np.pi * n / beta
    a = coeff_a(w, params)
    c = coeff_c(w, params)
    factors = np.abs(1.0 - a) ** 2 - c**2
    bad = np.flatnonzero(factors <= 0)
    if bad.size:
        k = int(n[bad[0]])
        raise SuperradiantRegime(f"factor at n={k} is non-positive", factor=f"n={k}", condition=cond)
    logs = -np.log(factors)
    ln_body = math.fsum(logs)

    t = params.tanh_factor
    lead = t * (params.g2**2 - params.g1**2)
    tail = 2.0 * lead * _inv_square_bosonic_tail(beta, M)
    c4 = abs(logs[-1] - 2.0 * lead / w[-1] ** 2) * w[-1] ** 4
    tail_err = c4 * _inv_quartic_bosonic_tail(beta, M)

    ln_value = ln_zero + ln_body + tail
    return RatioResult(
        value=math.exp(ln_value) if ln_value < 709 else math.inf,
        ln_value=ln_value,
        zero_mode_factor=math.exp(ln_zero),
        condition=cond,
        M=M,
        tail=tail,
        tail_error_estimate=tail_err,
        near_divergence=(1.0 - cond) <= DIVERGENCE_MARGIN,
    )


def bound_coefficients(k: int, params: ModelParams, fermi_M: int = 4096):
    """(a0(omega_k), c0(omega_k)) of the convergence bound, from the fermionic convolution sum."""
    beta = require_finite_beta(params, "bound_coefficients")
    w = 2 * np.pi * k / beta
    if k == 0:
        s = lorentzian_fermi_sum(params.omega_big, beta, max(fermi_M, 1)).value
    else:
        s = bound_kernel_sum(int(k), float(params.omega_big), float(beta), int(fermi_M)).value
    w0 = params.omega0
    a0 = (params.g1**2 + params.g2**2) / (beta * math.sqrt(w0**2 + w**2)) * s
    c0 = w0 * params.g1 * params.g2 / (beta * (w0**2 + w**2)) * s
    return a0, c0


def ratio_upper_bound(params: ModelParams, M: int = 1000, fermi_M: int = 4096) -> RatioResult:
    """Convergence bound on Z/Z0 built from a0(omega), c0(omega).

    Factors above the bosonic cutoff are added from a fit
    a0(omega) omega^2 ~ A ln(omega) + B through the last computed points.
    """
    beta = require_finite_beta(params, "ratio_upper_bound")
    if M < 4:
        raise DomainError("M", "M must be >= 4")
    a00, c00 = bound_coefficients(0, params, fermi_M)
    cond = a00 + 2.0 * c00
    _require_normal_phase(params, max(cond, transition_condition(params)))
    ln_zero = -0.5 * math.log((1.0 - a00 + 2.0 * c00) * (1.0 - a00 - 2.0 * c00))

    logs = np.empty(M)
    a0s = np.empty(M)
    for i, k in enumerate(range(1, M + 1)):
        a0k, c0k = bound_coefficients(k, params, fermi_M)
        f = (1.0 - a0k + 2.0 * c0k) * (1.0 - a0k - 2.0 * c0k)
        if f <= 0:
            raise SuperradiantRegime(f"bound factor at n={k} is non-positive", factor=f"n={k}", condition=cond)
        logs[i] = -math.log(f)
        a0s[i] = a0k
    ln_body = math.fsum(logs)

    wscale = 2 * np.pi / beta
    k1, k2 = M // 2, M
    w1, w2 = wscale * k1, wscale * k2
    y1, y2 = a0s[k1 - 1] * w1**2, a0s[k2 - 1] * w2**2
    A = (y2 - y1) / math.log(w2 / w1)
    B = y2 - A * math.log(w2)
    X = M + 0.5
    # -ln f ~ 2 a0 for small a0; midpoint-rule integral of 2 (A ln(c x) + B)/(c x)^2
    tail = 2.0 * (A * (math.log(wscale * X) + 1.0) + B) / (wscale**2 * X)
    tail_err = abs(logs[-1] - 2.0 * a0s[-1]) * M

    ln_value = ln_zero + ln_body + tail
    return RatioResult(
        value=math.exp(ln_value) if ln_value < 709 else math.inf,
        ln_value=ln_value,
        zero_mode_factor=math.exp(ln_zero),
        condition=cond,
        M=M,
        tail=tail,
        tail_error_estimate=tail_err,
        near_divergence=(1.0 - cond) <= DIVERGENCE_MARGIN,
        metadata={"fermi_M": fermi_M, "tail_fit": {"A": A, "B": B}},
    )


def is_superradiant(params: ModelParams) -> bool:
    return transition_condition(params) >= 1.0


def zero_t_condition(params: ModelParams) -> float:
    return (params.g1 + params.g2) ** 2 / (params.omega_big * params.omega0)
